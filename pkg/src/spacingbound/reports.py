"""CSV and JSON writers shared by the command line tools.

Floats are written with 17 significant digits so a CSV round-trips to the
same doubles, and nothing time- or host-dependent ends up in the output.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

EIGEN_HEADER = ("k", "E", "residual", "method")
BOUND_HEADER = ("X", "alpha", "beta", "h", "eigen_count", "margin")
SPACING_HEADER = ("k", "dk", "E", "dE", "h", "dk_over_h")
TRACE_HEADER = ("x", "ratio", "cap")
SWEEP_HEADER = ("family", "X", "h", "windows_checked", "violations", "min_eigen_count", "passed")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    try:
        return format(float(value), ".17g") if not isinstance(value, str) else value
    except (TypeError, ValueError):
        return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(doc) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if hasattr(obj, "item") and callable(obj.item):
        return _clean(obj.item())
    return obj


def eigen_rows(es, oracle=None):
    rows = []
    for i, (k, E, r) in enumerate(zip(es.eigen_momenta, es.eigen_energies, es.residuals)):
        row = [float(k), float(E), float(r), es.method]
        if oracle is not None:
            oE = float(oracle.eigen_energies[i]) if i < len(oracle) else math.nan
            row += [oE, abs(float(E) - oE) / abs(oE) if oE == oE else math.nan]
        rows.append(row)
    return rows


def bound_rows(report):
    return [(r.X, r.alpha, r.beta, r.h, r.eigen_count, r.margin) for r in report.rows]
