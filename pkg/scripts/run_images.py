#!/usr/bin/env python3
"""Two-dimensional error measurements over grayscale images.

Runs the row-column circuit transform over PGM images (or random
images when none are given), comparing against the double-precision
oracle.  Pixel values map to [0, 1] by dividing by the image maxval.
"""

import argparse
import json

from fhefft.arith import FixedFormat
from fhefft.fileio import read_pgm
from fhefft.harness import format_report_table, run_2d_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("images", nargs="*", help="PGM files (all one size)")
    parser.add_argument("--count", type=int, default=10,
                        help="random images to draw when no files are given")
    parser.add_argument("--side", type=int, default=16,
                        help="random image side length")
    parser.add_argument("--bits", type=int, default=32)
    parser.add_argument("--frac", type=int, default=16)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    fmt = FixedFormat(args.bits, args.frac)
    if args.images:
        stack = [read_pgm(p) for p in args.images]
        shape = stack[0].shape
        report = run_2d_experiment(images=stack, shape=shape, fmt=fmt)
    else:
        report = run_2d_experiment(images=args.count, shape=(args.side, args.side),
                                   fmt=fmt, seed=args.seed)
    print(format_report_table([report]))
    if args.json:
        print(json.dumps(report.as_dict()))


if __name__ == "__main__":
    main()
