"""CSV/JSON rendering of sweeps and comparisons, with atomic file writes."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from typing import Iterable, List, Optional

from .sweeps import SweepGrid

SWEEP_COLUMNS = ["gamma", "theta", "phi", "M", "lhs_sum_std", "lhs_sum_var",
                 "rhs_eq14", "rhs_eq3", "rhs_eq4", "rhs_eq5", "t1", "t2", "t3", "t4"]
FIG3_COLUMNS = ["L_new", "L_SUR", "L_new_closed", "L_SUR_closed"]


def fmt(x: Optional[float]) -> str:
    """17 significant digits; ``None`` and NaN become an empty cell."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    return f"{x:.17g}"


def _json_value(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return x


def sweep_columns(grid: SweepGrid) -> List[str]:
    return SWEEP_COLUMNS + (FIG3_COLUMNS if grid.name == "fig3" else [])


def sweep_rows(grid: SweepGrid) -> Iterable[dict]:
    for pt in grid.points:
        row = {
            "gamma": pt.gamma, "theta": pt.theta, "phi": pt.phi, "M": pt.mixedness,
            "lhs_sum_std": pt.lhs_sum_std, "lhs_sum_var": pt.lhs_sum_var,
            "rhs_eq14": pt.rhs_eq14, "rhs_eq3": pt.rhs_eq3, "rhs_eq4": pt.rhs_eq4,
            "rhs_eq5": pt.rhs_eq5,
            "t1": pt.ratios.t1, "t2": pt.ratios.t2, "t3": pt.ratios.t3, "t4": pt.ratios.t4,
        }
        for key in FIG3_COLUMNS:
            if key in pt.extras:
                row[key] = pt.extras[key]
        yield row


def render_table(columns: List[str], rows: Iterable[dict], fmt_: str = "csv", meta: Optional[dict] = None) -> str:
    rows = list(rows)
    if fmt_ == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row.get(c)) for c in columns])
        return buf.getvalue()
    if fmt_ == "json":
        doc = dict(meta or {})
        doc["points"] = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(doc, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt_!r}")


def render_sweep(grid: SweepGrid, fmt_: str = "csv") -> str:
    meta = {
        "sweep": grid.name,
        "axes": [{"name": a.name, "min": a.start, "max": a.stop, "steps": a.steps} for a in grid.axes],
    }
    return render_table(sweep_columns(grid), sweep_rows(grid), fmt_, meta)


def atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
