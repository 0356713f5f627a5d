"""Acceptance suite: one test per release criterion, at pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to get one printed
PASS line per criterion alongside the pytest verdicts.
"""

import math
import time

import numpy as np
import pytest

from circuit_util import pack_int_word, unpack_int_word, wrap_signed
from fhefft.arith import FixedFormat, add, input_word, mul_fixed, mul_integer, read_word, sub
from fhefft.engine import CleartextEngine, FheEngine
from fhefft.fft import fft_1d, input_signal, read_signal
from fhefft.fhe import DEFAULT_PARAMS, EXACT_PARAMS, GswScheme
from fhefft.gates import and_, nor_, not_, or_, xnor_, xor_
from fhefft.harness import run_1d_experiment, run_2d_experiment

F32 = FixedFormat(32, 16)
F16 = FixedFormat(16, 8)

# published reference means for uniform [0, 1] signals at 32.16 fixed point
REFERENCE_1D_MEAN = {8: 1.294e-5, 16: 2.216e-5, 32: 4.199e-5, 64: 8.383e-5, 128: 1.81e-4}
REFERENCE_2D_MEAN = 6.067e-5


def _ok(num, text):
    print(f"\n[criterion {num}] PASS: {text}")


def test_criterion_1_fhe_correctness():
    start = time.perf_counter()
    scheme = GswScheme(DEFAULT_PARAMS)
    keys = scheme.keygen(seed=10)
    rng = np.random.default_rng(10)

    bits = rng.integers(0, 2, 1000)
    hits = sum(
        scheme.decrypt_bit(keys.secret_key,
                           scheme.encrypt_bit(keys.public_key, int(b), rng)) == b
        for b in bits)
    assert hits == 1000

    nand_hits = 0
    for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)):
        for _ in range(250):
            c1 = scheme.encrypt_bit(keys.public_key, a, rng)
            c2 = scheme.encrypt_bit(keys.public_key, b, rng)
            out = scheme.decrypt_bit(keys.secret_key, scheme.hom_nand(c1, c2))
            nand_hits += out == 1 - (a and b)
    assert nand_hits == 1000

    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _ok(1, f"1000/1000 round trips and 1000/1000 NAND rows exact in {elapsed:.1f}s")


GATES = [(not_, None, 1), (and_, lambda a, b: a & b, 2), (or_, lambda a, b: a | b, 3),
         (xor_, lambda a, b: a ^ b, 4), (nor_, lambda a, b: 1 - (a | b), 4),
         (xnor_, lambda a, b: 1 - (a ^ b), 5)]


def test_criterion_2_gate_layer():
    scheme = GswScheme(DEFAULT_PARAMS)
    keys = scheme.keygen(seed=11)
    rng = np.random.default_rng(11)
    checked = 0
    for gate, oracle, cost in GATES:
        for a in (0, 1):
            for b in (0, 1) if oracle else (None,):
                want = oracle(a, b) if oracle else 1 - a
                for engine in (CleartextEngine(),
                               FheEngine(scheme, keys=keys, rng=rng)):
                    args = [engine.input_bit(a)]
                    if oracle:
                        args.append(engine.input_bit(b))
                    assert engine.read_back(gate(*args)) == want
                    assert engine.nand_count == cost
                    checked += 1
    _ok(2, f"6 gates exhaustive on both backends ({checked} evaluations), "
           f"NAND costs 1/2/3/4/4/5")


def test_criterion_3_arithmetic():
    # exhaustive 8-bit add and sub on the cleartext backend
    pairs = [(a, b) for a in range(256) for b in range(256)]
    eng = CleartextEngine(batch_size=len(pairs))
    x = pack_int_word(eng, [p[0] for p in pairs], 8)
    y = pack_int_word(eng, [p[1] for p in pairs], 8)
    add_counts = eng.nand_count
    sums = unpack_int_word(eng, add(x, y), signed=False)
    add_counts = eng.nand_count - add_counts
    assert add_counts <= 36 * 8
    assert all(got == (a + b) % 256 for (a, b), got in zip(pairs, sums))
    diffs = unpack_int_word(eng, sub(x, y), signed=False)
    assert all(got == (a - b) % 256 for (a, b), got in zip(pairs, diffs))

    # exhaustive 6-bit signed multiply
    mpairs = [(a, b) for a in range(-32, 32) for b in range(-32, 32)]
    eng6 = CleartextEngine(batch_size=len(mpairs))
    mx = pack_int_word(eng6, [p[0] for p in mpairs], 6)
    my = pack_int_word(eng6, [p[1] for p in mpairs], 6)
    prods = unpack_int_word(eng6, mul_integer(mx, my))
    assert eng6.nand_count <= 288 * 6**2 * math.log2(6)
    assert all(got == wrap_signed(a * b, 6) for (a, b), got in zip(mpairs, prods))

    # encrypted: 50 random 8-bit adds and 20 random 4-bit multiplies
    scheme = GswScheme(EXACT_PARAMS)
    keys = scheme.keygen(seed=12)
    rng = np.random.default_rng(12)
    fhe_rng = np.random.default_rng(13)
    for _ in range(50):
        a, b = (int(v) for v in rng.integers(-128, 128, 2))
        fhe = FheEngine(scheme, keys=keys, rng=fhe_rng)
        out = add(pack_int_word(fhe, [a], 8), pack_int_word(fhe, [b], 8))
        assert fhe.nand_count <= 36 * 8
        assert unpack_int_word(fhe, out) == [wrap_signed(a + b, 8)]
    for _ in range(20):
        a, b = (int(v) for v in rng.integers(-8, 8, 2))
        fhe = FheEngine(scheme, keys=keys, rng=fhe_rng)
        out = mul_integer(pack_int_word(fhe, [a], 4), pack_int_word(fhe, [b], 4))
        assert fhe.nand_count <= 288 * 4**2 * math.log2(4)
        assert unpack_int_word(fhe, out) == [wrap_signed(a * b, 4)]
    _ok(3, "exhaustive clear add/sub/mul exact; 50 encrypted adds and "
           "20 encrypted multiplies exact; counts within 36F and 288F^2log2F")


def test_criterion_4_fixed_point_multiply():
    rng = np.random.default_rng(14)
    xs = rng.uniform(-1, 1, 1000)
    ys = rng.uniform(-1, 1, 1000)
    eng = CleartextEngine(batch_size=1000)
    out = mul_fixed(input_word(eng, list(xs), F32), input_word(eng, list(ys), F32))
    worst = max(abs(got - x * y)
                for got, x, y in zip(read_word(eng, out), xs, ys))
    assert worst <= 3 * 2.0**-16
    _ok(4, f"1000 random products in [-1,1]: worst error {worst:.3e} <= 3*2^-16")


@pytest.fixture(scope="module")
def table1_reports():
    return {m: run_1d_experiment(m, trials=100, seed=0)
            for m in (8, 16, 32, 64, 128)}


def test_criterion_5_one_dimensional_reproduction(table1_reports):
    lines = []
    for m, ref in REFERENCE_1D_MEAN.items():
        rep = table1_reports[m]
        ratio = max(rep.mean_error / ref, ref / rep.mean_error)
        assert ratio <= 3.0, f"M={m}: mean {rep.mean_error:.3e} vs reference {ref:.3e}"
        assert rep.max_error <= rep.error_bound, f"M={m} exceeded the bound"
        lines.append(f"M={m} mean={rep.mean_error:.2e} ({ratio:.2f}x of {ref:.2e})")
    _ok(5, "; ".join(lines))


def test_criterion_6_two_dimensional_reproduction():
    rep = run_2d_experiment(images=10, shape=(16, 16), seed=6)
    assert rep.mean_error <= 1.2e-4
    assert rep.max_error <= rep.error_bound
    _ok(6, f"10 images 16x16: mean={rep.mean_error:.3e} "
           f"(reference {REFERENCE_2D_MEAN:.3e}, cap 1.2e-4), "
           f"max {rep.max_error:.2e} <= bound {rep.error_bound:.2e}")


def test_criterion_7_bound_soundness():
    runs = 0
    for m, seed in ((8, 20), (16, 21), (32, 22), (64, 23)):
        rep = run_1d_experiment(m, trials=32, seed=seed)
        # the aggregate max dominates every individual run's max
        assert rep.max_error <= rep.error_bound
        runs += rep.trials
    assert runs >= 100
    _ok(7, f"{runs} randomized runs of mixed sizes, zero bound violations")


def test_criterion_8_backend_equivalence():
    rng = np.random.default_rng(8)
    values = rng.uniform(0, 1, 4) + 1j * rng.uniform(0, 1, 4)
    clear = CleartextEngine()
    spec_clear = read_signal(clear, fft_1d(input_signal(clear, values, F16)))[0]

    scheme = GswScheme(EXACT_PARAMS)
    keys = scheme.keygen(seed=8)
    fhe = FheEngine(scheme, keys=keys, rng=rng)
    spec_fhe = read_signal(fhe, fft_1d(input_signal(fhe, values, F16)))[0]

    assert list(spec_fhe) == list(spec_clear)
    assert fhe.nand_count == clear.nand_count
    _ok(8, f"M=4 transform at 16.8 fixed point decrypts bit-identically "
           f"({fhe.nand_count} NANDs)")


def test_criterion_9_error_monotonicity():
    sizes = (8, 16, 32)
    seeds = range(30, 40)
    votes = 0
    for seed in seeds:
        means = [run_1d_experiment(m, trials=4, seed=seed).mean_error for m in sizes]
        votes += all(a <= b for a, b in zip(means, means[1:]))
    assert votes > len(list(seeds)) // 2, f"only {votes}/10 seeds monotone"

    finer_wins = 0
    for seed in seeds:
        coarse = run_1d_experiment(8, fmt=FixedFormat(32, 16), trials=4, seed=seed)
        fine = run_1d_experiment(8, fmt=FixedFormat(32, 24), trials=4, seed=seed)
        assert fine.mean_error < coarse.mean_error
        finer_wins += 1
    _ok(9, f"{votes}/10 seeds monotone in M; f=24 beat f=16 on "
           f"{finer_wins}/10 matched-signal runs")
