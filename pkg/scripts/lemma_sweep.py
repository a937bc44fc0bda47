#!/usr/bin/env python3
"""Density sweeps for the three shifted-prime lemmas, written as CSV.

Examples:
    python scripts/lemma_sweep.py --lemma 1 --N 100000 1000000 \
        --epsilon 0.1 0.2 0.3 0.4 --out friability.csv
    python scripts/lemma_sweep.py --lemma 3 --N 1000000 \
        --y 5 10 --z 50 100 1000
"""

import argparse
import itertools
import sys
from fractions import Fraction

from egyptsieve import __version__
from egyptsieve.reports import density_rows, render_csv
from egyptsieve.spectrum import (
    ShiftParams,
    divisor_window_density,
    friability_density,
    omega_deviation_density,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lemma", type=int, choices=(1, 2, 3), required=True)
    ap.add_argument("--N", type=int, nargs="+", required=True)
    ap.add_argument("--shift", type=int, default=1)
    ap.add_argument("--modulus", type=int, default=1)
    ap.add_argument("--epsilon", nargs="+", default=())
    ap.add_argument("--delta", nargs="+", default=())
    ap.add_argument("--y", nargs="+", default=())
    ap.add_argument("--z", nargs="+", default=())
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args(argv)

    shift = ShiftParams(args.shift, args.modulus)
    reps = []
    if args.lemma == 1:
        for N, eps in itertools.product(args.N, args.epsilon):
            reps.append(friability_density(N, shift, Fraction(eps)))
    elif args.lemma == 2:
        for N, delta in itertools.product(args.N, args.delta):
            reps.append(omega_deviation_density(N, shift, Fraction(delta)))
    else:
        for N, y, z in itertools.product(args.N, args.y, args.z):
            reps.append(divisor_window_density(N, shift, Fraction(y),
                                               Fraction(z)))
    text = render_csv(density_rows(reps), vars(args), __version__)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
