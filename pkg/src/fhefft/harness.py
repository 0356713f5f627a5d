"""Experiment harness: circuit FFT runs measured against a float oracle.

Random signals (components uniform in [0, 1]) are transformed by the
bit-level circuits and compared point-by-point against an independent
double-precision radix-2 implementation (not the circuit path, and not
numpy's FFT, which the test suite uses to validate the oracle itself).
Reports aggregate absolute per-component errors over all trials together
with the analytical bound for the run.

On the cleartext backend all trials of one experiment ride the engine's
batch lanes, so the circuit is built and counted exactly once.  FHE runs
are size-guarded: gate costs grow with M * log M * F^2 * log F times an
N^3 matrix product per NAND, so only small fully-encrypted transforms
are sensible on a desk machine.
"""

from __future__ import annotations

import cmath
import time
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .arith import FixedFormat
from .engine import CleartextEngine, FheEngine
from .error_model import ErrorParams, fft2d_error_bound, fft_error_bound, signal_headroom
from .errors import UsageError
from .fft import TwiddleTable, fft_1d, fft_2d, input_signal, read_signal
from .fhe import EXACT_PARAMS, GswScheme

DEFAULT_FORMAT = FixedFormat(32, 16)


@dataclass(frozen=True)
class ErrorReport:
    """Aggregated error statistics of one experiment.

    total_error sums |error| over every real component seen (2M per
    trial), mean_error divides by that count, variance and std_dev
    describe the same population, and error_bound is the analytical
    processing bound every component must stay under.  nand_count is the
    gate cost of one transform circuit.
    """

    size: object
    trials: int
    total_error: float
    mean_error: float
    variance: float
    std_dev: float
    max_error: float
    error_bound: float
    nand_count: int
    wall_time: float
    backend: str

    def as_dict(self) -> dict:
        d = asdict(self)
        if isinstance(d["size"], tuple):
            d["size"] = list(d["size"])
        return d


# -- independent oracle ------------------------------------------------------

def reference_fft(values) -> list[complex]:
    """Unnormalized forward DFT, double precision, radix-2 iterative."""
    x = [complex(v) for v in values]
    m = len(x)
    if m & (m - 1):
        raise UsageError(f"oracle needs a power-of-two length, got {m}")
    width = m.bit_length() - 1
    out = [None] * m
    for i, v in enumerate(x):
        rev = int(f"{i:0{width}b}"[::-1], 2) if width else 0
        out[rev] = v
    size = 2
    while size <= m:
        half = size // 2
        for k in range(half):
            w = cmath.exp(-2j * cmath.pi * k / size)
            for start in range(0, m, size):
                i, j = start + k, start + k + half
                t = w * out[j]
                out[i], out[j] = out[i] + t, out[i] - t
        size *= 2
    return out


def reference_fft2d(image) -> np.ndarray:
    """Row-column composition of the 1D oracle."""
    arr = np.asarray(image, dtype=complex)
    rows = np.array([reference_fft(r) for r in arr])
    return np.array([reference_fft(c) for c in rows.T]).T


# -- experiments --------------------------------------------------------------

def _error_stats(spectra: np.ndarray, oracle: np.ndarray) -> dict:
    diff = spectra - oracle
    errs = np.abs(np.concatenate([diff.real.ravel(), diff.imag.ravel()]))
    return {
        "total_error": float(errs.sum()),
        "mean_error": float(errs.mean()),
        "variance": float(errs.var()),
        "std_dev": float(errs.std()),
        "max_error": float(errs.max()),
    }


def _warn_on_headroom(fmt, m_points, x_bound):
    ratio = signal_headroom(fmt.total_bits, fmt.frac_bits, m_points, x_bound)
    if ratio >= 0.5:
        warnings.warn(
            f"signal may overflow the {fmt.total_bits}.{fmt.frac_bits} format: "
            f"worst-case magnitude uses {ratio:.0%} of the integer range",
            stacklevel=3)


def run_1d_experiment(m_points: int, fmt: FixedFormat = DEFAULT_FORMAT,
                      trials: int = 100, seed: int = 0, backend: str = "clear",
                      scheme: GswScheme | None = None, keys=None,
                      max_fhe_points: int = 8) -> ErrorReport:
    """Transform `trials` random signals of length m_points and report errors."""
    rng = np.random.default_rng(seed)
    signals = rng.uniform(0, 1, (trials, m_points)) + \
        1j * rng.uniform(0, 1, (trials, m_points))
    x_bound = float(max(np.abs(signals.real).max(), np.abs(signals.imag).max()))
    _warn_on_headroom(fmt, m_points, x_bound)
    oracle = np.array([reference_fft(s) for s in signals])

    start = time.perf_counter()
    if backend == "clear":
        engine = CleartextEngine(batch_size=trials)
        spectra = read_signal(engine, fft_1d(input_signal(engine, signals, fmt)))
        nand_count = engine.nand_count
    elif backend == "fhe":
        if m_points > max_fhe_points:
            raise UsageError(
                f"encrypted transform of {m_points} points refused: gate cost "
                f"is infeasible at desk scale (raise max_fhe_points to force)")
        if scheme is None:
            scheme = GswScheme(EXACT_PARAMS)
        if keys is None:
            keys = scheme.keygen(seed=seed)
        table = TwiddleTable(m_points, fmt)
        rows = []
        nand_count = 0
        for sig in signals:
            engine = FheEngine(scheme, keys=keys, rng=rng)
            out = fft_1d(input_signal(engine, sig, fmt), table)
            rows.append(read_signal(engine, out)[0])
            nand_count = engine.nand_count
        spectra = np.array(rows)
    else:
        raise UsageError(f"unknown backend {backend!r}")
    elapsed = time.perf_counter() - start

    bound = fft_error_bound(ErrorParams(2.0**-fmt.frac_bits, x_bound, m_points))
    return ErrorReport(size=m_points, trials=trials, error_bound=bound,
                       nand_count=nand_count, wall_time=elapsed,
                       backend=backend, **_error_stats(spectra, oracle))


def run_2d_experiment(images=10, shape=(16, 16), fmt: FixedFormat = DEFAULT_FORMAT,
                      seed: int = 0, backend: str = "clear") -> ErrorReport:
    """Transform grayscale images (values in [0, 1], zero imaginary part).

    ``images`` is a count of random images to draw, or an iterable of 2D
    arrays; all must share ``shape``.
    """
    if isinstance(images, int):
        rng = np.random.default_rng(seed)
        stack = rng.uniform(0, 1, (images, *shape))
    else:
        stack = np.asarray(list(images), dtype=float)
        if stack.shape[1:] != tuple(shape):
            raise UsageError(f"images of shape {stack.shape[1:]} for {shape}")
    if backend != "clear":
        raise UsageError("2D experiments run on the cleartext backend only")
    rows, cols = shape
    x_bound = float(np.abs(stack).max())
    _warn_on_headroom(fmt, rows * cols, x_bound)
    oracle = np.array([reference_fft2d(img) for img in stack])

    start = time.perf_counter()
    engine = CleartextEngine(batch_size=len(stack))
    flat = stack.reshape(len(stack), rows * cols).astype(complex)
    spec = read_signal(engine, fft_2d(input_signal(engine, flat, fmt, dims=shape)))
    elapsed = time.perf_counter() - start

    spectra = spec.reshape(len(stack), rows, cols)
    bound = fft2d_error_bound(rows, cols, 2.0**-fmt.frac_bits, x_bound)
    return ErrorReport(size=(rows, cols), trials=len(stack), error_bound=bound,
                       nand_count=engine.nand_count, wall_time=elapsed,
                       backend=backend, **_error_stats(spectra, oracle))


def format_report_table(reports) -> str:
    """Aligned text table of reports, one row per signal size."""
    headers = ("Size", "Trials", "Total Error", "Mean Error", "Variance",
               "Std Dev", "Bound", "NANDs", "Time [s]")
    rows = [headers]
    for r in reports:
        size = f"{r.size[0]}x{r.size[1]}" if isinstance(r.size, tuple) else str(r.size)
        rows.append((size, str(r.trials), f"{r.total_error:.4g}",
                     f"{r.mean_error:.4g}", f"{r.variance:.4g}",
                     f"{r.std_dev:.4g}", f"{r.error_bound:.4g}",
                     str(r.nand_count), f"{r.wall_time:.2f}"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(headers))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
