#!/usr/bin/env python3
"""Reproduce the one-dimensional random-signal error measurements.

Transforms batches of uniform [0, 1] complex signals at 32.16 fixed
point through the bit-level circuits and prints the aggregated error
statistics per size next to the analytical bound.
"""

import argparse
import json

from fhefft.arith import FixedFormat
from fhefft.harness import format_report_table, run_1d_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64,128")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--bits", type=int, default=32)
    parser.add_argument("--frac", type=int, default=16)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", action="store_true", help="also dump JSON records")
    args = parser.parse_args()

    fmt = FixedFormat(args.bits, args.frac)
    reports = [run_1d_experiment(int(m), fmt=fmt, trials=args.trials, seed=args.seed)
               for m in args.sizes.split(",")]
    print(format_report_table(reports))
    if args.json:
        for r in reports:
            print(json.dumps(r.as_dict()))


if __name__ == "__main__":
    main()
