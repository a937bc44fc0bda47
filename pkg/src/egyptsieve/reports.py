"""JSON and CSV emission for reports and certificates.

Rationals are encoded as {"num": "...", "den": "..."} with string
digits; primes in certificates are strings too, so 64-bit values
survive every JSON parser.  Report files embed the resolved run
configuration and the toolkit version; the timestamp sits on its own
line so byte-level comparisons can ignore it.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone
from fractions import Fraction

from .egypt import Decomposition
from .errors import DomainError
from .spectrum import DensityReport, SieveEstimate


def fraction_dict(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def fraction_from_dict(d) -> Fraction:
    try:
        return Fraction(int(d["num"]), int(d["den"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed rational {d!r}") from exc


def density_report_dict(rep: DensityReport) -> dict:
    return {
        "N": rep.N,
        "params": dict(rep.params),
        "count": rep.count,
        "normalizer": rep.normalizer,
        "relative_density": rep.relative_density,
        "baseline": rep.baseline,
        "reciprocal_sum": fraction_dict(rep.reciprocal_sum),
        "excluded": rep.excluded,
    }


def sieve_estimate_dict(est: SieveEstimate) -> dict:
    return {
        "X": fraction_dict(est.X),
        "f": {str(p): fraction_dict(v) for p, v in sorted(est.f.items())},
        "remainders": {str(d): fraction_dict(r)
                       for d, r in sorted(est.remainders.items())},
        "main_term": est.main_term,
        "exact_count": est.exact_count,
    }


def certificate_dict(dec: Decomposition) -> dict:
    return {
        "h": dec.h,
        "target": fraction_dict(dec.target),
        "primes": [str(p) for p in dec.primes],
    }


def certificate_from_dict(d) -> Decomposition:
    try:
        return Decomposition(
            h=int(d["h"]),
            target=fraction_from_dict(d["target"]),
            primes=tuple(int(p) for p in d["primes"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed certificate: {exc}") from exc


def render_report(payload: dict, config: dict, version: str,
                  timestamp: str | None = None) -> str:
    """Stable JSON text: sorted keys, embedded config and version, the
    timestamp isolated on its own line."""
    doc = dict(payload)
    doc["config"] = config
    doc["version"] = version
    doc["timestamp"] = timestamp or datetime.now(timezone.utc).isoformat()
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def density_rows(reports) -> list[dict]:
    """Flat CSV-ready rows for a parameter sweep."""
    rows = []
    for rep in reports:
        row = {"N": rep.N}
        row.update(rep.params)
        row.update({
            "count": rep.count,
            "normalizer": rep.normalizer,
            "excluded": rep.excluded,
            "relative_density": repr(rep.relative_density),
            "baseline": repr(rep.baseline),
            "reciprocal_sum": f"{rep.reciprocal_sum.numerator}"
                              f"/{rep.reciprocal_sum.denominator}",
        })
        rows.append(row)
    return rows


def render_csv(rows, config: dict, version: str,
               timestamp: str | None = None) -> str:
    """CSV with provenance comment lines; the timestamp comment is a
    separate line, like the JSON key."""
    buf = io.StringIO()
    buf.write(f"# version: {version}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    ts = timestamp or datetime.now(timezone.utc).isoformat()
    buf.write(f"# timestamp: {ts}\n")
    rows = list(rows)
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()),
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()
