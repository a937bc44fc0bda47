#!/usr/bin/env python3
"""Decompose a batch of targets and summarize certificate sizes.

Example:
    python scripts/decompose_batch.py --shift 1 --targets 1 1/2 2/3 5/7 \
        --certs-dir certs/
"""

import argparse
import json
import time
from fractions import Fraction
from pathlib import Path

from egyptsieve import __version__
from egyptsieve.egypt import decompose, verify
from egyptsieve.errors import ObstructionError, SearchExhausted
from egyptsieve.reports import certificate_dict


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shift", type=int, default=1)
    ap.add_argument("--targets", nargs="+", required=True)
    ap.add_argument("--certs-dir", help="write one certificate per target")
    args = ap.parse_args(argv)

    out_dir = Path(args.certs_dir) if args.certs_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for raw in args.targets:
        x = Fraction(raw)
        t0 = time.monotonic()
        try:
            dec = decompose(x, args.shift)
        except ObstructionError as exc:
            print(f"{raw}: obstructed ({exc.result.explanation})")
            continue
        except SearchExhausted as exc:
            print(f"{raw}: exhausted ({exc})")
            continue
        dt = time.monotonic() - t0
        res = verify(dec)
        print(f"{raw}: {len(dec.primes)} primes, largest {max(dec.primes)}, "
              f"verified={res.valid}, {dt:.2f}s")
        if out_dir:
            name = raw.replace("/", "_")
            path = out_dir / f"cert_h{args.shift}_{name}.json"
            path.write_text(json.dumps(
                {**certificate_dict(dec), "version": __version__}, indent=2))


if __name__ == "__main__":
    main()
