import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fhefft.errors import NoiseOverflowError, ParameterError
from fhefft.fhe import DEFAULT_PARAMS, SchemeParams, decode_gadget_samples


def test_params_derived_sizes():
    p = DEFAULT_PARAMS
    assert p.ell == 29
    assert p.n_ct == (p.n + 1) * p.ell


def test_params_reject_even_modulus():
    with pytest.raises(ParameterError):
        SchemeParams(n=4, q=2**20, noise_bound=1, depth_budget=1)


def test_params_reject_small_modulus_for_depth():
    # q < 8 * nb * (N+1)^depth
    with pytest.raises(ParameterError):
        SchemeParams(n=4, q=2**20 - 1, noise_bound=2, depth_budget=3)


def test_params_zero_noise_allows_any_depth():
    p = SchemeParams(n=1, q=127, noise_bound=0, depth_budget=10**12)
    assert p.n_ct == 14


def test_keygen_secret_structure(default_scheme, default_keys):
    p = default_scheme.params
    sk = default_keys.secret_key
    assert sk.shape == (p.n + 1,)
    assert sk[-1] == 1


def test_keygen_public_times_secret_is_small(default_scheme, default_keys):
    p = default_scheme.params
    prod = default_keys.public_key.astype(object) @ default_keys.secret_key.astype(object)
    centered = [(int(x) % p.q + p.q // 2) % p.q - p.q // 2 for x in prod]
    assert max(abs(e) for e in centered) <= p.noise_bound


def test_keygen_deterministic(default_scheme):
    k1 = default_scheme.keygen(seed=42)
    k2 = default_scheme.keygen(seed=42)
    assert np.array_equal(k1.public_key, k2.public_key)
    assert np.array_equal(k1.secret_key, k2.secret_key)
    k3 = default_scheme.keygen(seed=43)
    assert not np.array_equal(k3.public_key, k1.public_key)


def test_bit_round_trip(default_scheme, default_keys, rng):
    for bit in (0, 1):
        ct = default_scheme.encrypt_bit(default_keys.public_key, bit, rng)
        assert ct.level == 0
        assert default_scheme.decrypt_bit(default_keys.secret_key, ct) == bit


def test_bit_round_trip_randomized(default_scheme, default_keys, rng):
    bits = rng.integers(0, 2, 200)
    for b in bits:
        ct = default_scheme.encrypt_bit(default_keys.public_key, int(b), rng)
        assert default_scheme.decrypt_bit(default_keys.secret_key, ct) == b


def test_encrypt_rejects_non_bit(default_scheme, default_keys, rng):
    with pytest.raises(ValueError):
        default_scheme.encrypt_bit(default_keys.public_key, 2, rng)


def test_nand_truth_table(default_scheme, default_keys, rng):
    pk, sk = default_keys.public_key, default_keys.secret_key
    for a in (0, 1):
        for b in (0, 1):
            c1 = default_scheme.encrypt_bit(pk, a, rng)
            c2 = default_scheme.encrypt_bit(pk, b, rng)
            out = default_scheme.hom_nand(c1, c2)
            assert out.level == 1
            assert default_scheme.decrypt_bit(sk, out) == 1 - (a and b)


def test_nand_noise_growth_bounded(default_scheme, default_keys, rng):
    """Measured noise after NAND obeys (N+1) * max input noise + fresh."""
    p = default_scheme.params
    pk, sk = default_keys.public_key, default_keys.secret_key
    for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)):
        c1 = default_scheme.encrypt_bit(pk, a, rng)
        c2 = default_scheme.encrypt_bit(pk, b, rng)
        n_in = max(default_scheme.measure_noise(sk, c1),
                   default_scheme.measure_noise(sk, c2))
        n_out = default_scheme.measure_noise(sk, default_scheme.hom_nand(c1, c2))
        assert n_out <= (p.n_ct + 1) * n_in + p.m * p.noise_bound


def test_depth_budget_enforced(default_scheme, default_keys, rng):
    pk = default_keys.public_key
    ct = default_scheme.encrypt_bit(pk, 1, rng)
    for _ in range(default_scheme.params.depth_budget):
        ct = default_scheme.hom_nand(ct, ct)
    with pytest.raises(NoiseOverflowError):
        default_scheme.hom_nand(ct, ct)


def test_trivial_encrypt_is_noiseless(default_scheme, default_keys):
    sk = default_keys.secret_key
    for b in (0, 1):
        ct = default_scheme.trivial_encrypt_bit(b)
        assert default_scheme.decrypt_bit(sk, ct) == b
        assert default_scheme.measure_noise(sk, ct) == 0


def test_hom_not_is_free_of_noise_growth(default_scheme, default_keys, rng):
    pk, sk = default_keys.public_key, default_keys.secret_key
    ct = default_scheme.encrypt_bit(pk, 1, rng)
    inv = default_scheme.hom_not(ct)
    assert inv.level == ct.level
    assert default_scheme.decrypt_bit(sk, inv) == 0
    assert default_scheme.measure_noise(sk, inv) == \
        default_scheme.measure_noise(sk, ct)


def test_value_round_trip_full_range(default_scheme, default_keys, rng):
    pk, sk = default_keys.public_key, default_keys.secret_key
    q = default_scheme.params.q
    values = [0, 1, q - 1, q // 2] + [int(v) for v in rng.integers(0, q, 40)]
    for v in values:
        ct = default_scheme.encrypt_value(pk, v, rng)
        assert default_scheme.decrypt_value(sk, ct) == v


def test_hom_add_small_example(default_scheme, default_keys, rng):
    pk, sk = default_keys.public_key, default_keys.secret_key
    c = default_scheme.hom_add(default_scheme.encrypt_value(pk, 3, rng),
                               default_scheme.encrypt_value(pk, 5, rng))
    assert default_scheme.decrypt_value(sk, c) == 8


def test_hom_add_matches_ring_oracle(default_scheme, default_keys, rng):
    pk, sk = default_keys.public_key, default_keys.secret_key
    q = default_scheme.params.q
    for _ in range(100):
        m1, m2 = int(rng.integers(0, q)), int(rng.integers(0, q))
        out = default_scheme.hom_add(default_scheme.encrypt_value(pk, m1, rng),
                                     default_scheme.encrypt_value(pk, m2, rng))
        assert default_scheme.decrypt_value(sk, out) == (m1 + m2) % q


def test_hom_const_mult_matches_ring_oracle(default_scheme, default_keys, rng):
    pk, sk = default_keys.public_key, default_keys.secret_key
    q = default_scheme.params.q
    ct = default_scheme.encrypt_value(pk, 12345, rng)
    assert default_scheme.decrypt_value(sk, default_scheme.hom_const_mult(ct, 0)) == 0
    for _ in range(30):
        m = int(rng.integers(0, q))
        k = int(rng.integers(0, q))
        out = default_scheme.hom_const_mult(default_scheme.encrypt_value(pk, m, rng), k)
        assert default_scheme.decrypt_value(sk, out) == (m * k) % q


def test_hom_mult_matches_ring_oracle(default_scheme, default_keys, rng):
    # ciphertext-ciphertext noise scales with plaintext size, so messages are
    # drawn below 2^15 (products still wrap mod q about half the time)
    pk, sk = default_keys.public_key, default_keys.secret_key
    q = default_scheme.params.q
    for _ in range(100):
        m1, m2 = int(rng.integers(0, 2**15)), int(rng.integers(0, 2**15))
        out = default_scheme.hom_mult(default_scheme.encrypt_value(pk, m1, rng),
                                      default_scheme.encrypt_value(pk, m2, rng))
        assert default_scheme.decrypt_value(sk, out) == (m1 * m2) % q


def test_wrong_key_raises_noise_overflow(default_scheme, default_keys, rng):
    other = default_scheme.keygen(seed=999)
    observed = 0
    for _ in range(16):
        ct = default_scheme.encrypt_bit(default_keys.public_key, 1, rng)
        try:
            default_scheme.decrypt_bit(other.secret_key, ct)
        except NoiseOverflowError:
            observed += 1
    assert observed >= 8  # garbage decryptions overwhelmingly trip the check


@given(st.integers(min_value=0, max_value=2**29 - 4), st.data())
@settings(max_examples=200, deadline=None)
def test_gadget_decoder_exact_under_adversarial_noise(mu, data):
    """The sample decoder recovers mu under any per-row noise below q/8."""
    q = 2**29 - 3
    ell = 29
    bound = q // 8
    errs = data.draw(st.lists(st.integers(min_value=-(bound - 1), max_value=bound - 1),
                              min_size=ell, max_size=ell))
    xs = [((mu << j) + e) % q for j, e in enumerate(errs)]
    assert decode_gadget_samples(xs, q, bound) == mu


@pytest.mark.parametrize("mu", [0, 1, 2**28, 2**29 - 4])
@pytest.mark.parametrize("sign", [1, -1])
def test_gadget_decoder_at_noise_extremes(mu, sign):
    q = 2**29 - 3
    bound = q // 8
    xs = [((mu << j) + sign * (bound - 1)) % q for j in range(29)]
    assert decode_gadget_samples(xs, q, bound) == mu


def test_exact_params_deep_chain(exact_scheme, exact_keys, rng):
    """With noise_bound=0 arbitrarily deep NAND chains stay exact."""
    pk, sk = exact_keys.public_key, exact_keys.secret_key
    ct = exact_scheme.encrypt_bit(pk, 0, rng)
    expected = 0
    for _ in range(64):
        ct = exact_scheme.hom_nand(ct, ct)
        expected = 1 - (expected and expected)
    assert exact_scheme.decrypt_bit(sk, ct) == expected
    assert exact_scheme.measure_noise(sk, ct) == 0
