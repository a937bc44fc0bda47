"""Command-line workbench: sieve, analyze, decompose, verify, sweep.

Exit codes: 0 success, 1 no-result-within-budget (exhausted search,
insufficient merge, failed certificate check), 2 domain or
configuration errors.  Every report embeds the resolved configuration
and toolkit version; config resolution is defaults, then config file,
then command-line flags.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .arith import sieve_primes
from .egypt import (
    DEFAULT_BUDGET,
    SearchBudget,
    decompose,
    r_fold_disjoint,
    verify,
)
from .errors import CapacityError, DomainError, SearchExhausted
from . import reports
from .spectrum import (
    ShiftParams,
    divisor_window_density,
    friability_density,
    omega_deviation_density,
)

CACHE_ENV = "EGYPTSIEVE_CACHE_DIR"

_DEFAULTS = {
    "command": None,
    "limit": None,
    "N": None,
    "shift": 1,
    "modulus": 1,
    "epsilon": None,
    "delta": None,
    "y": None,
    "z": None,
    "target": None,
    "r_fold": None,
    "max_prime": DEFAULT_BUDGET.max_prime,
    "max_terms": DEFAULT_BUDGET.max_terms,
    "out": None,
    "primes_out": None,
    "format": "json",
    "seed": 0,
    "cert": None,
    "grid": None,
}


@dataclass
class RunConfig:
    command: str = None
    limit: int = None
    N: int = None
    shift: int = 1
    modulus: int = 1
    epsilon: str = None
    delta: str = None
    y: str = None
    z: str = None
    target: str = None
    r_fold: int = None
    max_prime: int = DEFAULT_BUDGET.max_prime
    max_terms: int = DEFAULT_BUDGET.max_terms
    out: str = None
    primes_out: str = None
    format: str = "json"
    seed: int = 0
    cert: str = None
    grid: str = None

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def resolve_config(cli_args: dict, config_path: str | None) -> RunConfig:
    """defaults < config file < explicitly set CLI flags."""
    merged = dict(_DEFAULTS)
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config file: {exc}") from exc
        if not isinstance(loaded, dict):
            raise DomainError("config file must hold a JSON object")
        for key, val in loaded.items():
            if key not in merged:
                raise DomainError(f"unknown config key {key!r}")
            merged[key] = val
    for key, val in cli_args.items():
        if val is not None and key in merged:
            merged[key] = val
    merged["command"] = cli_args.get("command") or merged["command"]
    return RunConfig(**merged)


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _budget(cfg: RunConfig) -> SearchBudget:
    return SearchBudget(max_prime=int(cfg.max_prime),
                        max_terms=int(cfg.max_terms))


def _cmd_sieve(cfg: RunConfig) -> int:
    if cfg.limit is None:
        raise DomainError("sieve needs --limit")
    limit = int(cfg.limit)
    cache_dir = os.environ.get(CACHE_ENV)
    cache_path = None
    cache_hit = False
    primes = None
    if cache_dir:
        cache_path = Path(cache_dir) / f"primes-{limit}.npy"
        if cache_path.exists():
            primes = np.load(cache_path)
            cache_hit = True
    if primes is None:
        primes = np.fromiter(sieve_primes(limit), dtype=np.int64)
        if cache_path is not None:
            cache_path.parent.mkdir(parents=True, exist_ok=True)
            np.save(cache_path, primes)
    if cfg.primes_out:
        p = Path(cfg.primes_out)
        if p.suffix == ".npy":
            np.save(p, primes)
        else:
            p.write_text("\n".join(str(int(q)) for q in primes) + "\n")
    payload = {
        "limit": limit,
        "count": int(len(primes)),
        "largest": int(primes[-1]) if len(primes) else None,
        "cache_hit": cache_hit,
        "cache_path": str(cache_path) if cache_path else None,
    }
    _write_or_print(reports.render_report(payload, cfg.as_dict(), __version__),
                    cfg.out)
    return 0


def _analyze_one(lemma: int, N: int, shift: ShiftParams, cfg: RunConfig):
    if lemma == 1:
        if cfg.epsilon is None:
            raise DomainError("lemma 1 needs --epsilon")
        return friability_density(N, shift, Fraction(str(cfg.epsilon)))
    if lemma == 2:
        if cfg.delta is None:
            raise DomainError("lemma 2 needs --delta")
        return omega_deviation_density(N, shift, Fraction(str(cfg.delta)))
    if lemma == 3:
        if cfg.y is None or cfg.z is None:
            raise DomainError("lemma 3 needs --y and --z")
        return divisor_window_density(N, shift, Fraction(str(cfg.y)),
                                      Fraction(str(cfg.z)))
    raise DomainError(f"unknown lemma {lemma}")


def _cmd_decompose(cfg: RunConfig) -> int:
    if cfg.target is None:
        raise DomainError("decompose needs --target")
    try:
        target = Fraction(str(cfg.target))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"malformed target {cfg.target!r}") from exc
    budget = _budget(cfg)
    h = int(cfg.shift)
    if cfg.r_fold is not None:
        decs = r_fold_disjoint(target, h, int(cfg.r_fold), budget)
        for dec in decs:
            res = verify(dec)
            if not res.valid:
                raise RuntimeError(f"internal: {res.reason}")
        payload = {"decompositions": [reports.certificate_dict(d)
                                      for d in decs]}
    else:
        dec = decompose(target, h, budget)
        res = verify(dec)
        if not res.valid:
            raise RuntimeError(f"internal: {res.reason}")
        payload = reports.certificate_dict(dec)
    _write_or_print(reports.render_report(payload, cfg.as_dict(), __version__),
                    cfg.out)
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    if cfg.cert is None:
        raise DomainError("verify needs --cert")
    try:
        doc = json.loads(Path(cfg.cert).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read certificate: {exc}") from exc
    certs = doc.get("decompositions", [doc]) if isinstance(doc, dict) else None
    if certs is None:
        raise DomainError("certificate file must hold a JSON object")
    results = []
    all_ok = True
    for entry in certs:
        dec = reports.certificate_from_dict(entry)
        res = verify(dec)
        all_ok &= res.valid
        results.append({"valid": res.valid, "reason": res.reason,
                        "primes": len(dec.primes)})
    payload = {"results": results, "all_valid": all_ok}
    _write_or_print(reports.render_report(payload, cfg.as_dict(), __version__),
                    cfg.out)
    return 0 if all_ok else 1


def _grid_points(grid: dict) -> list[dict]:
    lists = {}
    for key, val in grid.items():
        lists[key] = val if isinstance(val, list) else [val]
    if "lemma" not in lists:
        raise DomainError("grid needs a lemma")
    keys = sorted(lists)
    combos = []
    for values in itertools.product(*(lists[k] for k in keys)):
        combos.append(dict(zip(keys, values)))
    return combos


def _cmd_sweep(cfg: RunConfig) -> int:
    if cfg.grid is None:
        raise DomainError("sweep needs --grid")
    try:
        grid = json.loads(Path(cfg.grid).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read grid: {exc}") from exc
    if not isinstance(grid, dict):
        raise DomainError("grid file must hold a JSON object")
    points = _grid_points(grid) if grid else []
    if len(points) > 10 ** 4:
        raise DomainError(f"grid cardinality {len(points)} exceeds 1e4")
    reps = []
    for pt in points:
        lemma = int(pt["lemma"])
        N = int(pt.get("N", cfg.N or 0))
        shift = ShiftParams(int(pt.get("shift", cfg.shift)),
                            int(pt.get("modulus", cfg.modulus)))
        if lemma == 1:
            rep = friability_density(N, shift, Fraction(str(pt["epsilon"])))
        elif lemma == 2:
            rep = omega_deviation_density(N, shift, Fraction(str(pt["delta"])))
        elif lemma == 3:
            rep = divisor_window_density(N, shift, Fraction(str(pt["y"])),
                                         Fraction(str(pt["z"])))
        else:
            raise DomainError(f"unknown lemma {lemma}")
        reps.append(rep)
    rows = reports.density_rows(reps)
    if cfg.format == "csv":
        text = reports.render_csv(rows, cfg.as_dict(), __version__)
    else:
        text = reports.render_report({"rows": rows}, cfg.as_dict(),
                                     __version__)
    _write_or_print(text, cfg.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON config file (flags override it)")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"),
                        default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(
        prog="egyptsieve", parents=[common],
        description="Egyptian fractions over shifted primes and a "
                    "shifted-prime density workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sieve", parents=[common], help="enumerate primes")
    s.add_argument("--limit", type=int, required=True)
    s.add_argument("--primes-out", dest="primes_out")

    a = sub.add_parser("analyze", parents=[common],
                       help="one density measurement")
    a.add_argument("--lemma", type=int, choices=(1, 2, 3), required=True)
    a.add_argument("--N", type=int, required=True)
    a.add_argument("--shift", type=int)
    a.add_argument("--modulus", type=int)
    a.add_argument("--epsilon")
    a.add_argument("--delta")
    a.add_argument("--y")
    a.add_argument("--z")

    d = sub.add_parser("decompose", parents=[common],
                       help="find a decomposition certificate")
    d.add_argument("--target", required=True, help="rational, e.g. 5/3")
    d.add_argument("--shift", type=int)
    d.add_argument("--r-fold", dest="r_fold", type=int)
    d.add_argument("--max-prime", dest="max_prime", type=int)
    d.add_argument("--max-terms", dest="max_terms", type=int)

    v = sub.add_parser("verify", parents=[common],
                       help="check a certificate file")
    v.add_argument("--cert", required=True)

    w = sub.add_parser("sweep", parents=[common],
                       help="density reports over a parameter grid")
    w.add_argument("--grid", required=True)
    return ap


def run(cfg: RunConfig, lemma: int | None = None) -> int:
    if cfg.command == "sieve":
        return _cmd_sieve(cfg)
    if cfg.command == "analyze":
        shift = ShiftParams(int(cfg.shift), int(cfg.modulus))
        rep = _analyze_one(lemma, int(cfg.N), shift, cfg)
        if cfg.format == "csv":
            text = reports.render_csv(reports.density_rows([rep]),
                                      cfg.as_dict(), __version__)
        else:
            payload = {"lemma": lemma,
                       "report": reports.density_report_dict(rep)}
            text = reports.render_report(payload, cfg.as_dict(), __version__)
        _write_or_print(text, cfg.out)
        return 0
    if cfg.command == "decompose":
        return _cmd_decompose(cfg)
    if cfg.command == "verify":
        return _cmd_verify(cfg)
    if cfg.command == "sweep":
        return _cmd_sweep(cfg)
    raise DomainError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    args = vars(ns)
    config_path = args.pop("config", None)
    lemma = args.pop("lemma", None)
    try:
        cfg = resolve_config(args, config_path)
        return run(cfg, lemma=lemma)
    except (DomainError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SearchExhausted as exc:
        print(f"exhausted: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
