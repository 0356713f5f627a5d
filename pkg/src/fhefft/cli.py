"""Command-line interface.

The crypto pipeline mirrors the client/server split: `keygen` and
`encrypt` run client side, `fft` runs server side on ciphertexts and
public circuit constants only (no key material), `decrypt` and `verify`
close the loop client side.  `bound` and `bench` expose the analytical
error/cost model and the experiment harness.

Exit codes: 0 success, 2 parse or usage error, 3 noise overflow
(wrong key or exhausted depth budget), 4 bound violation in `verify`.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import fileio
from .arith import FixedFormat
from .engine import FheEngine, GateStats
from .error_model import ErrorParams, GateCostModel, fft2d_error_bound, fft_error_bound, nand_cost, space_cost
from .errors import FhefftError, NoiseOverflowError, ParameterError, ParseError, RangeError, UsageError
from .fft import fft_1d, fft_2d, input_signal, read_signal
from .fhe import DEFAULT_PARAMS, EXACT_PARAMS, GswScheme
from .harness import format_report_table, reference_fft, reference_fft2d, run_1d_experiment, run_2d_experiment

_PRESETS = {"default": DEFAULT_PARAMS, "exact": EXACT_PARAMS}


def _load_params(args):
    if getattr(args, "params", None):
        return fileio.read_params(args.params)
    return _PRESETS[getattr(args, "preset", "default")]


def cmd_keygen(args) -> int:
    params = _load_params(args)
    scheme = GswScheme(params)
    keys = scheme.keygen(seed=args.seed)
    fileio.write_keys(args.out, params, keys)
    print(f"wrote key pair for n={params.n}, q={params.q} to {args.out}")
    if params.noise_bound == 0:
        print("note: noise-free toy parameters, no security margin at all")
    return 0


def cmd_encrypt(args) -> int:
    params, keys = fileio.read_keys(args.keys)
    scheme = GswScheme(params)
    fmt = FixedFormat(args.bits, args.frac)
    if args.signal.endswith(".pgm"):
        image = fileio.read_pgm(args.signal)
        values = image.astype(complex).ravel()
        dims = image.shape
    else:
        values, meta = fileio.read_signal_text(args.signal)
        dims = meta.dims if meta.dims is not None else len(values)
    engine = FheEngine(scheme, public_key=keys.public_key,
                       rng=np.random.default_rng(args.seed))
    signal = input_signal(engine, values, fmt, dims=dims)
    fileio.write_ciphertext_signal(args.out, params, engine, signal, fmt)
    n_pts = len(signal.points)
    print(f"encrypted {n_pts} points ({dims}) at {fmt.total_bits}.{fmt.frac_bits} "
          f"fixed point into {args.out}")
    return 0


def cmd_fft(args) -> int:
    # evaluation needs no key material: ciphertexts in, ciphertexts out
    probe_params = fileio.read_ciphertext_params(args.ciphertext)
    scheme = GswScheme(probe_params)
    engine = FheEngine(scheme, threads=args.threads)
    signal, fmt = fileio.read_ciphertext_signal(args.ciphertext, engine)
    if args.frac_override is not None and args.frac_override != fmt.frac_bits:
        raise UsageError("twiddle precision must match the encrypted format")
    out = fft_2d(signal) if isinstance(signal.dims, tuple) else fft_1d(signal)
    fileio.write_ciphertext_signal(args.out, probe_params, engine, out, fmt)
    stats: GateStats = engine.stats
    print(f"transformed {signal.dims} -> {args.out}; "
          f"NANDs={stats.nand_count} depth={stats.max_depth}")
    if args.stats:
        print(json.dumps({"nand_count": stats.nand_count,
                          "max_depth": stats.max_depth}))
    return 0


def cmd_decrypt(args) -> int:
    params, keys = fileio.read_keys(args.keys)
    scheme = GswScheme(params)
    engine = FheEngine(scheme, keys=keys)
    signal, fmt = fileio.read_ciphertext_signal(args.ciphertext, engine)
    try:
        values = read_signal(engine, signal)[0]
    except NoiseOverflowError as exc:
        raise NoiseOverflowError(
            f"{exc} (wrong key file, or the circuit exceeded the depth "
            f"budget of the chosen parameters)") from exc
    fileio.write_signal_text(args.out, values, dims=signal.dims, fmt=fmt)
    print(f"decrypted {len(values)} points to {args.out}")
    return 0


def cmd_verify(args) -> int:
    plain, _ = fileio.read_signal_text(args.plain)
    spectrum, meta = fileio.read_signal_text(args.spectrum)
    frac = meta.frac_bits if meta.frac_bits is not None else args.frac
    delta = 2.0 ** -frac
    dims = meta.dims if meta.dims is not None else len(spectrum)
    if isinstance(dims, tuple):
        rows, cols = dims
        oracle = reference_fft2d(plain.reshape(rows, cols)).ravel()
        x_bound = args.xb if args.xb else float(np.abs(plain).max())
        bound = fft2d_error_bound(rows, cols, delta, x_bound)
    else:
        oracle = np.array(reference_fft(plain))
        x_bound = args.xb if args.xb else float(
            max(np.abs(plain.real).max(), np.abs(plain.imag).max()))
        bound = fft_error_bound(ErrorParams(delta, x_bound, int(dims)))
    diff = spectrum - oracle
    errs = np.abs(np.concatenate([diff.real, diff.imag]))
    report = {
        "size": list(dims) if isinstance(dims, tuple) else dims,
        "total_error": float(errs.sum()),
        "mean_error": float(errs.mean()),
        "variance": float(errs.var()),
        "std_dev": float(errs.std()),
        "max_error": float(errs.max()),
        "error_bound": bound,
    }
    print(json.dumps(report, indent=2))
    if errs.max() > bound:
        print("bound violated", file=sys.stderr)
        return 4
    return 0


def cmd_bound(args) -> int:
    delta = 2.0 ** -args.frac
    params = ErrorParams(delta, args.xb, args.points)
    model = GateCostModel(fixed_width=args.bits, ct_side=args.ct_side,
                          signal_len=args.points,
                          signal_total=args.total or args.points)
    out = {
        "points": args.points,
        "delta": delta,
        "x_bound": args.xb,
        "error_bound": fft_error_bound(params),
        "nand_cost": {op: nand_cost(model, op) for op in ("add", "mul", "fft")},
        "space_cost_entries": space_cost(model),
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    reports = []
    for m in sizes:
        if args.dims == 2:
            side = int(np.sqrt(m))
            reports.append(run_2d_experiment(images=args.trials, shape=(side, side),
                                             fmt=FixedFormat(args.bits, args.frac),
                                             seed=args.seed))
        else:
            reports.append(run_1d_experiment(
                m, fmt=FixedFormat(args.bits, args.frac), trials=args.trials,
                seed=args.seed, backend=args.backend))
    print(format_report_table(reports))
    if args.json:
        for r in reports:
            print(json.dumps(r.as_dict()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fhefft",
        description="FFT over encrypted fixed-point signals")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    p.add_argument("--params", help="JSON parameter file")
    p.add_argument("--preset", choices=sorted(_PRESETS), default="default",
                   help="named parameter preset when no --params file is given")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a signal or PGM image")
    p.add_argument("signal", help="text signal (re,im per line) or .pgm image")
    p.add_argument("--keys", required=True)
    p.add_argument("--bits", type=int, default=32, help="word width F")
    p.add_argument("--frac", type=int, default=16, help="fractional bits f")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("fft", help="transform an encrypted signal (server side)")
    p.add_argument("ciphertext")
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--frac-override", type=int, default=None,
                   help="assert the twiddle precision (must match the file)")
    p.add_argument("--stats", action="store_true", help="print gate stats as JSON")
    p.set_defaults(func=cmd_fft)

    p = sub.add_parser("decrypt", help="decrypt an encrypted signal")
    p.add_argument("ciphertext")
    p.add_argument("--keys", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("verify", help="compare a decrypted spectrum to the oracle")
    p.add_argument("plain", help="original plaintext signal file")
    p.add_argument("spectrum", help="decrypted spectrum file")
    p.add_argument("--frac", type=int, default=16,
                   help="fractional bits when the spectrum file lacks metadata")
    p.add_argument("--xb", type=float, default=None, help="signal component bound")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bound", help="print error bound and cost table")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--frac", type=int, default=16)
    p.add_argument("--xb", type=float, default=1.0)
    p.add_argument("--bits", type=int, default=32)
    p.add_argument("--ct-side", type=int, default=GswScheme(DEFAULT_PARAMS).params.n_ct)
    p.add_argument("--total", type=int, default=None,
                   help="total stored points L (defaults to --points)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("bench", help="run the random-signal experiments")
    p.add_argument("--sizes", default="8,16,32,64,128")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--backend", choices=("clear", "fhe"), default="clear")
    p.add_argument("--dims", type=int, choices=(1, 2), default=1)
    p.add_argument("--bits", type=int, default=32)
    p.add_argument("--frac", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoiseOverflowError as exc:
        print(f"noise overflow: {exc}", file=sys.stderr)
        return 3
    except (ParseError, UsageError, ParameterError, RangeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FhefftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
