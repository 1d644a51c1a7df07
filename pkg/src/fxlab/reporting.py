"""Report serialization: atomic JSON/CSV writes and long-format plot data."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

PLOT_KINDS = ("forecast_vs_actual", "topic_trend", "si_series", "convergence")


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_default) + "\n"


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def write_json(report: dict, path: str | Path) -> Path:
    return atomic_write_text(path, dumps(report))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def table_csv(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    if not rows:
        return ""
    columns = list(columns or rows[0].keys())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def write_table(rows: Sequence[dict], path: str | Path, columns: Sequence[str] | None = None) -> Path:
    return atomic_write_text(path, table_csv(rows, columns))


def _long(records: Iterable[tuple[str, object, object]], key: str) -> list[dict]:
    return [{"series": s, key: k, "value": v} for s, k, v in records]


def plot_rows(report: dict, what: str, model: str | None = None) -> tuple[list[dict], str]:
    """Long-format rows ``(series, date|index, value)`` for one plot kind."""
    if what not in PLOT_KINDS:
        raise ValueError(f"unknown plot data {what!r}; valid values: {', '.join(PLOT_KINDS)}")
    aux = report.get("aux", {})
    if what == "forecast_vs_actual":
        if "actual" not in report or "models" not in report:
            raise ValueError("report has no forecasts")
        ok = [m for m, b in report["models"].items() if b.get("status") == "ok"]
        if model is None:
            if not ok:
                raise ValueError("report has no successful model")
            model = ok[0]
        if model not in ok:
            raise ValueError(f"model {model!r} has no predictions in the report")
        dates = report["dates"]
        rec = [("actual", d, v) for d, v in zip(dates, report["actual"])]
        rec += [(model, d, v) for d, v in zip(dates, report["models"][model]["predictions"])]
        return _long(rec, "date"), "date"
    if what == "si_series":
        si = aux.get("si_series")
        if not si:
            raise ValueError("report has no sentiment index series")
        rec = [(name, d, v) for name in sorted(k for k in si if k != "dates")
               for d, v in zip(si["dates"], si[name])]
        return _long(rec, "date"), "date"
    if what == "topic_trend":
        tr = aux.get("topic_trend")
        if not tr:
            raise ValueError("report has no topic trend")
        K = len(tr["prevalence"][0]) if tr["prevalence"] else 0
        rec = [(f"topic{k}", start, row[k]) for k in range(K)
               for start, row in zip(tr["slice_starts"], tr["prevalence"])]
        return _long(rec, "date"), "date"
    rec = []
    for name, block in report.get("models", {}).items():
        hist = block.get("info", {}).get("search_history")
        if hist is not None:
            rec += [(name, i + 1, v) for i, v in enumerate(hist)]
    if not rec:
        raise ValueError("report has no optimizer history")
    return _long(rec, "index"), "index"


def emit_plot_data(report: dict, what: str, out_dir: str | Path, model: str | None = None) -> Path:
    rows, key = plot_rows(report, what, model)
    return write_table(rows, Path(out_dir) / f"{what}.csv", ["series", key, "value"])
