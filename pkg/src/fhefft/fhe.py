"""Leveled fully homomorphic encryption over Z_q with matrix ciphertexts.

The scheme is the matrix-flattening variant of LWE-based FHE (Gentry,
Sahai, Waters 2013).  A ciphertext is an N x N binary matrix over Z_q
with N = (n+1) * ceil(log2 q); the secret key s has its last coordinate
fixed to 1, and v = powers_of_2(s) satisfies  C @ v = mu * v + e (mod q)
for a small error vector e.  Keeping every ciphertext in flattened
(bit-decomposed) form means all homomorphic matrix products multiply
binary matrices, which this module evaluates exactly with float64 BLAS.

Supported homomorphic operations:

* ``hom_nand``       -- Flatten(I - C1 @ C2), bits only
* ``hom_add``        -- Flatten(C1 + C2), Z_q plaintexts
* ``hom_const_mult`` -- Flatten(Flatten(k * I) @ C), Z_q plaintexts
* ``hom_mult``       -- Flatten(C1 @ C2), Z_q plaintexts

Noise model: a fresh ciphertext carries error at most m * noise_bound;
one NAND maps errors (e1, e2) to at most |e1| + N * |e2|, so worst-case
noise after depth d is below (N + 1)**d times the fresh noise.  The
``SchemeParams`` invariant ``q > 8 * noise_bound * (N + 1)**depth_budget``
guarantees decryption below depth_budget.  With ``noise_bound = 0`` the
scheme is exact at any depth (and, like all parameter sets this package
ships, provides no cryptographic security; see README).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoiseOverflowError, ParameterError

# float64 matrix products stay exact only while every intermediate
# integer is below 2**52; params validation enforces this.
_EXACT_BITS = 52


def _ceil_log2(q: int) -> int:
    return int(q - 1).bit_length()


@dataclass(frozen=True)
class SchemeParams:
    """Parameters of the lattice scheme.

    n            lattice dimension
    q            ciphertext modulus (odd)
    m            number of LWE samples in the public key
    noise_bound  max initial error magnitude per public-key sample
    depth_budget max NAND depth guaranteed decryptable
    """

    n: int
    q: int
    m: int = 32
    noise_bound: int = 2
    depth_budget: int = 3

    @property
    def ell(self) -> int:
        """Bits per Z_q value, ceil(log2 q)."""
        return _ceil_log2(self.q)

    @property
    def n_ct(self) -> int:
        """Ciphertext side length N = (n + 1) * ell."""
        return (self.n + 1) * self.ell

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ParameterError("n and m must be positive")
        if self.q < 8 or self.q % 2 == 0:
            raise ParameterError("q must be an odd integer >= 8")
        if self.noise_bound < 0 or self.depth_budget < 0:
            raise ParameterError("noise_bound and depth_budget must be >= 0")
        # exactness limits of the float64 arithmetic backing this implementation
        if (self.n_ct + 1) << self.ell >= 1 << _EXACT_BITS:
            raise ParameterError(
                f"q={self.q} with n={self.n} exceeds the exact-arithmetic "
                f"limit (need (N+1)*2^ell < 2^{_EXACT_BITS})")
        if self.m * self.q >= 1 << _EXACT_BITS:
            raise ParameterError("m * q too large for exact encryption arithmetic")
        # decryption-correctness margin
        if self.noise_bound > 0:
            margin_bits = math.log2(8 * self.noise_bound) + \
                self.depth_budget * math.log2(self.n_ct + 1)
            if margin_bits >= 200 or \
                    self.q <= 8 * self.noise_bound * (self.n_ct + 1) ** self.depth_budget:
                raise ParameterError(
                    f"q={self.q} too small for noise_bound={self.noise_bound} at "
                    f"depth_budget={self.depth_budget}: need q > 8*nb*(N+1)^depth")

    def digest(self) -> str:
        """Stable short hash identifying this parameter set."""
        text = f"{self.n},{self.q},{self.m},{self.noise_bound},{self.depth_budget}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


# Defaults sized so a NAND is a 261^3 binary matrix product (~1 ms) and the
# params invariant admits depth 3, enough for every derived logic gate.
DEFAULT_PARAMS = SchemeParams(n=8, q=2**29 - 3, m=32, noise_bound=2, depth_budget=3)

# Noise-free toy parameters: every ciphertext decrypts exactly at any depth,
# which is what makes deep circuits (word adders, multipliers, whole FFTs)
# runnable at desk scale.  Zero noise also means zero security.
EXACT_PARAMS = SchemeParams(n=2, q=2**16 + 1, m=8, noise_bound=0, depth_budget=10**9)


def decode_gadget_samples(xs: list[int], q: int, error_bound: int) -> int:
    """Solve x_j = mu * 2^j + e_j (mod q) for mu, given |e_j| <= error_bound.

    Row 0 pins mu within +-error_bound; each refinement step picks the
    highest row whose wrap count is still determined by the current
    estimate (2^(j-shift) * halfwidth + error_bound < q/2), unwinds it,
    and divides the uncertainty by the extra power of two, until the
    estimate isolates one integer.
    """
    ell = len(xs)
    error_bound = max(error_bound, 1)
    est, shift = xs[0], 0  # mu ~ est / 2^shift, halfwidth error_bound / 2^shift
    while (1 << shift) <= 2 * error_bound:
        room = (q // 2 - error_bound - 1) // error_bound
        step = max(1, room.bit_length() - 1)
        j = min(ell - 1, shift + step)
        wraps = (2 * ((est << (j - shift)) - xs[j]) + q) // (2 * q)
        est, shift = wraps * q + xs[j], j
        if j == ell - 1:
            break
    return ((est + (1 << (shift - 1))) >> shift) % q


@dataclass(frozen=True)
class KeyPair:
    """Public m x (n+1) matrix A and secret (n+1)-vector s with s[-1] = 1.

    By construction A @ s mod q is the sample error vector, every entry
    at most noise_bound in magnitude.
    """

    public_key: np.ndarray
    secret_key: np.ndarray


@dataclass(eq=False)
class Ciphertext:
    """Flattened N x N binary matrix encrypting one bit or one Z_q value.

    ``matrix`` is float64 holding 0.0/1.0 entries (float keeps the matrix
    products on the BLAS fast path; all values stay exact integers).
    ``level`` counts accumulated NAND depth; ``noise_est`` is a worst-case
    error-magnitude bound used for operand ordering and fail-fast checks,
    never for correctness.
    """

    matrix: np.ndarray
    level: int = 0
    noise_est: int = 0


class GswScheme:
    """Operations of the scheme for one fixed parameter set."""

    def __init__(self, params: SchemeParams = DEFAULT_PARAMS):
        self.params = params
        p = params
        self._identity = np.eye(p.n_ct)
        self._pow2 = (1 << np.arange(p.ell, dtype=np.int64)).astype(np.float64)

    # -- gadget plumbing ------------------------------------------------

    def _decompose(self, mat: np.ndarray) -> np.ndarray:
        """Row-wise binary decomposition of an (r, n+1) int64 matrix in [0, q)."""
        p = self.params
        bits = (mat[:, :, None] >> np.arange(p.ell, dtype=np.int64)) & 1
        return bits.reshape(mat.shape[0], p.n_ct).astype(np.float64)

    def _recompose(self, mat: np.ndarray) -> np.ndarray:
        """Inverse of _decompose up to mod q; accepts any integer-valued rows."""
        p = self.params
        vals = mat.reshape(mat.shape[0], p.n + 1, p.ell) @ self._pow2
        return np.mod(vals, p.q).astype(np.int64)

    def flatten(self, mat: np.ndarray) -> np.ndarray:
        """Map any integer-valued N x N matrix to its binary canonical form."""
        return self._decompose(self._recompose(mat))

    def _powers_of_secret(self, secret_key: np.ndarray) -> np.ndarray:
        p = self.params
        v = np.empty(p.n_ct, dtype=np.float64)
        for i in range(p.n + 1):
            s = int(secret_key[i])
            for j in range(p.ell):
                v[i * p.ell + j] = (s << j) % p.q
        return v

    def _scaled_gadget(self, mu: int) -> np.ndarray:
        """The (N, n+1) matrix whose flattening encodes mu * I_N."""
        p = self.params
        g = np.zeros((p.n_ct, p.n + 1), dtype=np.int64)
        cols = np.repeat(np.arange(p.n + 1), p.ell)
        rows = np.arange(p.n_ct)
        vals = np.array([(mu << j) % p.q for j in range(p.ell)], dtype=np.int64)
        g[rows, cols] = np.tile(vals, p.n + 1)
        return g

    # -- key generation and encryption ----------------------------------

    def keygen(self, seed) -> KeyPair:
        """Generate a key pair; deterministic for a fixed seed."""
        p = self.params
        rng = np.random.default_rng(seed)
        t = rng.integers(0, p.q, p.n, dtype=np.int64)
        b_mat = rng.integers(0, p.q, (p.m, p.n), dtype=np.int64)
        err = rng.integers(-p.noise_bound, p.noise_bound + 1, p.m, dtype=np.int64)
        # entries reach q^2, so take the product over python ints
        body = b_mat.astype(object) @ t.astype(object)
        b_col = np.array([(int(x) + int(e)) % p.q for x, e in zip(body, err)],
                         dtype=np.int64)
        public = np.concatenate([b_mat, b_col[:, None]], axis=1)
        secret = np.concatenate([(p.q - t) % p.q, np.array([1], dtype=np.int64)])
        return KeyPair(public_key=public, secret_key=secret)

    def _encrypt(self, public_key: np.ndarray, mu: int, rng) -> Ciphertext:
        p = self.params
        r_mat = rng.integers(0, 2, (p.n_ct, p.m)).astype(np.float64)
        masked = r_mat @ public_key.astype(np.float64)
        body = np.mod(masked + self._scaled_gadget(mu % p.q), p.q).astype(np.int64)
        return Ciphertext(matrix=self._decompose(body), level=0,
                          noise_est=p.m * p.noise_bound)

    def encrypt_bit(self, public_key: np.ndarray, bit: int, rng) -> Ciphertext:
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        return self._encrypt(public_key, bit, rng)

    def encrypt_value(self, public_key: np.ndarray, value: int, rng) -> Ciphertext:
        """Encrypt an arbitrary Z_q value (for the ring operations)."""
        return self._encrypt(public_key, value % self.params.q, rng)

    def trivial_encrypt_bit(self, bit: int) -> Ciphertext:
        """Noiseless deterministic encoding of a public constant."""
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        body = np.mod(self._scaled_gadget(bit), self.params.q).astype(np.int64)
        return Ciphertext(matrix=self._decompose(body), level=0, noise_est=0)

    # -- decryption ------------------------------------------------------

    def _check_level(self, ct: Ciphertext):
        if ct.level > self.params.depth_budget:
            raise NoiseOverflowError(
                f"ciphertext level {ct.level} exceeds depth budget "
                f"{self.params.depth_budget}")

    def _gadget_rows(self, secret_key: np.ndarray, ct: Ciphertext) -> list[int]:
        """x_j = mu * 2^j + e_j (mod q) for the rows paired with s[-1] = 1."""
        p = self.params
        v = self._powers_of_secret(secret_key)
        block = ct.matrix[p.n * p.ell:(p.n + 1) * p.ell]
        xs = np.mod(block @ v, p.q).astype(np.int64)
        return [int(x) for x in xs]

    def decrypt_bit(self, secret_key: np.ndarray, ct: Ciphertext) -> int:
        """Recover an encrypted bit; raises once noise reaches q/8."""
        bit, _ = self.decrypt_bit_with_noise(secret_key, ct)
        return bit

    def decrypt_bit_with_noise(self, secret_key, ct) -> tuple[int, int]:
        """Decrypt a bit and report the measured noise magnitude."""
        p = self.params
        self._check_level(ct)
        j = (p.q // 2).bit_length() - 1  # largest power of two <= q/2 (so > q/4)
        x = self._gadget_rows(secret_key, ct)[j]
        if x > p.q // 2:
            x -= p.q
        scale = 1 << j
        mu = (2 * x + scale) // (2 * scale)
        noise = abs(x - mu * scale)
        if mu not in (0, 1) or noise >= (p.q + 7) // 8:
            raise NoiseOverflowError(
                f"noise {noise} at or above decryption threshold q/8={p.q / 8:.0f}")
        return mu, noise

    def decrypt_value(self, secret_key: np.ndarray, ct: Ciphertext) -> int:
        """Recover a Z_q plaintext by successive gadget refinement.

        Exact whenever every gadget-row error stays below q/8.
        """
        p = self.params
        self._check_level(ct)
        xs = self._gadget_rows(secret_key, ct)
        mu = decode_gadget_samples(xs, p.q, p.q // 8)
        self._check_residuals(xs, mu)
        return mu

    def _check_residuals(self, xs: list[int], mu: int):
        p = self.params
        worst = self._max_residual(xs, mu)
        if worst >= (p.q + 7) // 8:
            raise NoiseOverflowError(
                f"noise {worst} at or above decryption threshold q/8={p.q / 8:.0f}")

    def _max_residual(self, xs: list[int], mu: int) -> int:
        p = self.params
        worst = 0
        for j, x in enumerate(xs):
            e = (x - ((mu << j) % p.q)) % p.q
            if e > p.q // 2:
                e -= p.q
            worst = max(worst, abs(e))
        return worst

    def measure_noise(self, secret_key: np.ndarray, ct: Ciphertext) -> int:
        """Measured max error magnitude across the gadget rows (diagnostic)."""
        xs = self._gadget_rows(secret_key, ct)
        mu = self.decrypt_value(secret_key, ct)
        return self._max_residual(xs, mu)

    # -- homomorphic evaluation ------------------------------------------

    def hom_nand(self, ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
        """NOT(b1 AND b2) as Flatten(I - C1 @ C2); level = max + 1.

        The left operand's error enters the result unscaled while the right
        one picks up a factor N, so the noisier ciphertext goes left.
        """
        p = self.params
        level = max(ct1.level, ct2.level) + 1
        if level > p.depth_budget:
            raise NoiseOverflowError(
                f"NAND at level {level} would exceed depth budget {p.depth_budget}")
        if ct2.noise_est > ct1.noise_est:
            ct1, ct2 = ct2, ct1
        prod = ct1.matrix @ ct2.matrix
        est = min(ct1.noise_est + p.n_ct * ct2.noise_est, p.q)
        return Ciphertext(matrix=self.flatten(self._identity - prod),
                          level=level, noise_est=est)

    def hom_not(self, ct: Ciphertext) -> Ciphertext:
        """Complement without a matrix product: Flatten(I - C).

        Linear, so noise magnitude and level are unchanged.  This backs the
        engine's free simplification of NAND against a known constant 1.
        """
        return Ciphertext(matrix=self.flatten(self._identity - ct.matrix),
                          level=ct.level, noise_est=ct.noise_est)

    def hom_add(self, ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
        """Encrypts (m1 + m2) mod q; errors add."""
        return Ciphertext(matrix=self.flatten(ct1.matrix + ct2.matrix),
                          level=max(ct1.level, ct2.level),
                          noise_est=min(ct1.noise_est + ct2.noise_est, self.params.q))

    def hom_const_mult(self, ct: Ciphertext, k: int) -> Ciphertext:
        """Encrypts (k * m) mod q; error grows by at most N regardless of k."""
        p = self.params
        mk = self._decompose(np.mod(self._scaled_gadget(k % p.q), p.q).astype(np.int64))
        return Ciphertext(matrix=self.flatten(mk @ ct.matrix),
                          level=ct.level,
                          noise_est=min(p.n_ct * ct.noise_est, p.q))

    def hom_mult(self, ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
        """Encrypts (m1 * m2) mod q.

        The right operand's error gains a factor N; the left one is scaled
        by the right plaintext, so noise is message-dependent and only small
        messages multiply reliably.  noise_est cannot see plaintexts and is
        a heuristic here.
        """
        p = self.params
        if ct2.noise_est > ct1.noise_est:
            ct1, ct2 = ct2, ct1
        est = min(ct1.noise_est + p.n_ct * ct2.noise_est, p.q)
        return Ciphertext(matrix=self.flatten(ct1.matrix @ ct2.matrix),
                          level=max(ct1.level, ct2.level), noise_est=est)
