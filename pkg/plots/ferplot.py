"""Shared helpers for the plotting scripts.

This package consumes the simulation harness only through its file formats:
FER sweep CSVs and achievable-rate CSVs. The log-linear crossing finder is
deliberately re-implemented here (not imported) and cross-checked against
the CLI's gap output in the tests.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

METRIC_COLUMNS = {
    "pm": "pm_fer",
    "lml": "lml_fer",
    "list": "list_fer",
    "mllb": "mllb_fer",
}

# style roles for the standard five-curve comparison, one per curve type
STYLE_ROLES = {
    "l3-pm": dict(color="#b01f24", linestyle="-", marker="o"),
    "l3-list": dict(color="#e67e22", linestyle="--", marker="s"),
    "l3-ml": dict(color="#6a3d9a", linestyle="-", marker="^"),
    "l3-ml-epmu": dict(color="#1f78b4", linestyle="-", marker="v"),
    "linf-pm": dict(color="#33a02c", linestyle="-", marker="D"),
    "linf-mllb": dict(color="#33a02c", linestyle=":", marker=None),
    "awgn-pm": dict(color="#555555", linestyle="-", marker="x"),
    "awgn-mllb": dict(color="#555555", linestyle=":", marker=None),
}


class SchemaError(Exception):
    pass


@dataclass
class FerCurve:
    label: str
    ebn0_db: list
    fer: list
    ci_low: list
    ci_high: list
    style: dict


def read_csv_columns(path) -> dict[str, list[float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty CSV")
        cols = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in cols:
                cols[name].append(float(row[name]))
    if not next(iter(cols.values()), None):
        raise SchemaError(f"{path}: no data rows")
    return cols


def load_fer_curve(path, metric: str, label: str, role: str | None = None) -> FerCurve:
    if metric not in METRIC_COLUMNS:
        raise SchemaError(f"unknown metric {metric!r}")
    cols = read_csv_columns(path)
    fer_col = METRIC_COLUMNS[metric]
    ci_lo = f"{metric}_ci95_low"
    ci_hi = f"{metric}_ci95_high"
    for need in ("ebn0_db", fer_col, ci_lo, ci_hi):
        if need not in cols:
            raise SchemaError(f"{path}: missing column {need}")
    style = dict(STYLE_ROLES.get(role or "", {}))
    return FerCurve(label=label, ebn0_db=cols["ebn0_db"], fer=cols[fer_col],
                    ci_low=cols[ci_lo], ci_high=cols[ci_hi], style=style)


def crossing_ebn0(ebn0_db, fer, target: float) -> float:
    """Eb/N0 of the log-linear FER crossing (same rule as the CLI's gap)."""
    pts = sorted((x, f) for x, f in zip(ebn0_db, fer) if f > 0)
    for (xa, fa), (xb, fb) in zip(pts, pts[1:]):
        if fa >= target >= fb:
            if fa == fb:
                return xa
            t = (math.log(target) - math.log(fa)) / (math.log(fb) - math.log(fa))
            return xa + t * (xb - xa)
    raise ValueError(f"target {target} not bracketed")
