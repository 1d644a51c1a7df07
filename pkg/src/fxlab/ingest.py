"""Loading, alignment, scaling and windowing of daily series and documents."""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

CATEGORIES = ("news", "analysis")

SCORE_RANGES = {
    "sentiment": (-1.0, 1.0),
    "class_prob": (0.0, 1.0),
    "polarity": (-1.0, 1.0),
    "subjectivity": (0.0, 1.0),
}


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


def _to_dates(values: Iterable) -> np.ndarray:
    return np.asarray([np.datetime64(v, "D") for v in values], dtype="datetime64[D]")


@dataclass(frozen=True)
class SeriesFrame:
    """Dated, aligned multivariate series. Missing cells are NaN."""

    dates: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        object.__setattr__(self, "dates", dates)
        if dates.size > 1 and not np.all(dates[1:] > dates[:-1]):
            raise DataError("dates must be strictly increasing")
        cols = {}
        for name, values in self.columns.items():
            arr = np.asarray(values, dtype=float)
            if arr.shape != dates.shape:
                raise DataError(
                    f"column {name!r} has {arr.size} values for {dates.size} dates"
                )
            arr = arr.copy()
            arr.setflags(write=False)
            cols[name] = arr
        object.__setattr__(self, "columns", cols)

    def __len__(self) -> int:
        return int(self.dates.size)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    @property
    def missing(self) -> np.ndarray:
        """Boolean mask (rows x columns) of missing cells."""
        if not self.columns:
            return np.zeros((len(self), 0), dtype=bool)
        return np.isnan(self.values())

    def values(self, names: Sequence[str] | None = None) -> np.ndarray:
        names = self.names if names is None else list(names)
        if not names:
            return np.zeros((len(self), 0))
        return np.column_stack([self.columns[n] for n in names])

    def select(self, names: Sequence[str]) -> "SeriesFrame":
        return SeriesFrame(self.dates, {n: self.columns[n] for n in names})

    def take(self, rows) -> "SeriesFrame":
        rows = np.asarray(rows)
        return SeriesFrame(self.dates[rows], {n: v[rows] for n, v in self.columns.items()})

    def with_columns(self, extra: Mapping[str, np.ndarray]) -> "SeriesFrame":
        cols = dict(self.columns)
        cols.update(extra)
        return SeriesFrame(self.dates, cols)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", *self.names])
            for i, d in enumerate(self.dates):
                row = [str(d)]
                for n in self.names:
                    v = self.columns[n][i]
                    row.append("" if np.isnan(v) else repr(float(v)))
                writer.writerow(row)


@dataclass(frozen=True)
class DocumentRecord:
    date: np.datetime64
    category: str
    text: str
    scores: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "date", np.datetime64(self.date, "D"))
        if self.category not in CATEGORIES:
            raise DataError(f"category must be one of {CATEGORIES}, got {self.category!r}")
        for key, value in self.scores.items():
            if key not in SCORE_RANGES:
                raise DataError(f"unknown score {key!r}")
            lo, hi = SCORE_RANGES[key]
            if not lo <= value <= hi:
                raise DataError(f"score {key}={value} outside [{lo}, {hi}]")


def load_series_csv(
    path: str | Path,
    date_column: str = "date",
    value_columns: Sequence[str] | None = None,
) -> SeriesFrame:
    """Read a dated CSV; rows are sorted by date, duplicate dates rejected."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row expected") from None
        if date_column not in header:
            raise DataError(f"{path}: no {date_column!r} column in header")
        date_idx = header.index(date_column)
        if value_columns is None:
            value_columns = [h for h in header if h != date_column]
        missing = [c for c in value_columns if c not in header]
        if missing:
            raise DataError(f"{path}: columns not found: {missing}")
        idx = [header.index(c) for c in value_columns]

        dates, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                dates.append(dt.date.fromisoformat(row[date_idx].strip()))
                rows.append([float(row[i]) if row[i].strip() else np.nan for i in idx])
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from None

    order = sorted(range(len(dates)), key=dates.__getitem__)
    sorted_dates = [dates[i] for i in order]
    for a, b in zip(sorted_dates, sorted_dates[1:]):
        if a == b:
            raise DataError(f"{path}: duplicate date {a.isoformat()}")
    values = np.asarray([rows[i] for i in order], dtype=float).reshape(len(order), len(idx))
    return SeriesFrame(
        _to_dates(sorted_dates),
        {name: values[:, j] for j, name in enumerate(value_columns)},
    )


def load_documents_jsonl(path: str | Path) -> list[DocumentRecord]:
    docs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                docs.append(
                    DocumentRecord(
                        date=dt.date.fromisoformat(obj["date"]),
                        category=obj["category"],
                        text=obj["text"],
                        scores={k: float(v) for k, v in (obj.get("scores") or {}).items()},
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from None
    return docs


def write_documents_jsonl(docs: Sequence[DocumentRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for d in docs:
            obj = {"date": str(d.date), "category": d.category, "text": d.text}
            if d.scores:
                obj["scores"] = d.scores
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def align_and_fill(frames: Sequence[SeriesFrame], policy: str = "forward_fill") -> SeriesFrame:
    """Join frames on date.

    ``drop_incomplete`` keeps the date intersection and drops any row with a
    missing cell. ``forward_fill`` takes the union of dates, carries the last
    observed value forward and then drops leading rows that are still
    incomplete.
    """
    if not frames:
        raise DataError("at least one frame required")
    if policy not in ("forward_fill", "drop_incomplete"):
        raise DataError(f"unknown policy {policy!r}")

    names: list[str] = []
    for f in frames:
        for n in f.names:
            if n in names:
                raise DataError(f"column {n!r} appears in more than one frame")
            names.append(n)

    if policy == "drop_incomplete":
        dates = frames[0].dates
        for f in frames[1:]:
            dates = np.intersect1d(dates, f.dates)
    else:
        dates = np.unique(np.concatenate([f.dates for f in frames]))

    cols = {}
    for f in frames:
        pos = np.searchsorted(f.dates, dates)
        pos_c = np.minimum(pos, len(f) - 1)
        hit = (pos < len(f)) & (f.dates[pos_c] == dates)
        for n in f.names:
            col = np.full(dates.shape, np.nan)
            col[hit] = f.columns[n][pos_c[hit]]
            cols[n] = col

    if policy == "forward_fill":
        for n, col in cols.items():
            last = np.nan
            for i in range(col.size):
                if np.isnan(col[i]):
                    col[i] = last
                else:
                    last = col[i]

    if cols:
        keep = ~np.isnan(np.column_stack(list(cols.values()))).any(axis=1)
    else:
        keep = np.ones(dates.shape, dtype=bool)
    if not keep.any():
        raise DataError("aligned frame is empty (no common complete dates)")
    return SeriesFrame(dates[keep], {n: c[keep] for n, c in cols.items()})


@dataclass(frozen=True)
class MinMaxScaler:
    """Per-column (min, max) fitted on a subset of rows."""

    names: tuple[str, ...]
    lo: np.ndarray
    hi: np.ndarray

    def transform_column(self, name: str, values: np.ndarray) -> np.ndarray:
        j = self.names.index(name)
        lo, hi = self.lo[j], self.hi[j]
        values = np.asarray(values, dtype=float)
        if hi > lo:
            return (values - lo) / (hi - lo)
        return np.full(values.shape, 0.5)

    def inverse_column(self, name: str, values: np.ndarray) -> np.ndarray:
        j = self.names.index(name)
        lo, hi = self.lo[j], self.hi[j]
        values = np.asarray(values, dtype=float)
        if hi > lo:
            return values * (hi - lo) + lo
        return np.full(values.shape, lo)

    def transform(self, frame: SeriesFrame) -> SeriesFrame:
        return SeriesFrame(
            frame.dates, {n: self.transform_column(n, frame[n]) for n in self.names}
        )

    def inverse(self, frame: SeriesFrame) -> SeriesFrame:
        return SeriesFrame(
            frame.dates, {n: self.inverse_column(n, frame[n]) for n in self.names}
        )


def minmax_normalize(frame: SeriesFrame, fit_rows) -> tuple[SeriesFrame, MinMaxScaler]:
    """Scale every column by the min/max of ``fit_rows``; constant columns map to 0.5."""
    fit_rows = np.asarray(fit_rows)
    if fit_rows.size == 0:
        raise DataError("fit_rows must be non-empty")
    vals = frame.values()[fit_rows]
    scaler = MinMaxScaler(tuple(frame.names), vals.min(axis=0), vals.max(axis=0))
    return scaler.transform(frame), scaler


def make_direction_labels(closes) -> np.ndarray:
    """1 where the close is at or above the previous close, else 0 (length n-1)."""
    closes = np.asarray(closes, dtype=float)
    if closes.size < 2:
        raise DataError("direction labels need at least 2 observations")
    return (closes[1:] >= closes[:-1]).astype(np.int64)


@dataclass(frozen=True)
class SupervisedSet:
    windows: np.ndarray  # (n_windows, timesteps, n_features)
    targets: np.ndarray  # (n_windows,)
    feature_names: tuple[str, ...]
    target_rows: np.ndarray  # frame row index of each target
    scaler: MinMaxScaler | None = None

    def __len__(self) -> int:
        return int(self.targets.size)

    def subset(self, mask) -> "SupervisedSet":
        return SupervisedSet(
            self.windows[mask], self.targets[mask], self.feature_names,
            self.target_rows[mask], self.scaler,
        )


def make_supervised_windows(
    frame01: SeriesFrame,
    target_column: str,
    timesteps: int,
    horizon: int = 1,
    feature_names: Sequence[str] | None = None,
    scaler: MinMaxScaler | None = None,
) -> SupervisedSet:
    """Window ``k`` covers rows ``[k, k + timesteps)``; its target is row ``k + timesteps + horizon - 1``."""
    if timesteps < 1 or horizon < 1:
        raise DataError("timesteps and horizon must be >= 1")
    n = len(frame01)
    if n < timesteps + horizon:
        raise DataError(f"need at least {timesteps + horizon} rows, frame has {n}")
    names = frame01.names if feature_names is None else list(feature_names)
    data = frame01.values(names)
    count = n - timesteps - horizon + 1
    idx = np.arange(count)[:, None] + np.arange(timesteps)[None, :]
    target_rows = np.arange(count) + timesteps + horizon - 1
    return SupervisedSet(
        windows=data[idx],
        targets=np.asarray(frame01[target_column])[target_rows].copy(),
        feature_names=tuple(names),
        target_rows=target_rows,
        scaler=scaler,
    )


@dataclass(frozen=True)
class SegmentationSpec:
    train_start: np.datetime64
    train_end: np.datetime64
    context_days: int
    forecast_start: np.datetime64
    forecast_end: np.datetime64

    def __post_init__(self):
        for name in ("train_start", "train_end", "forecast_start", "forecast_end"):
            object.__setattr__(self, name, np.datetime64(getattr(self, name), "D"))
        if self.context_days < 0:
            raise DataError("context_days must be >= 0")
        if not self.train_start <= self.train_end:
            raise DataError("train_start must not be after train_end")
        if not self.train_end < self.forecast_start:
            raise DataError("train_end must precede forecast_start")
        if not self.forecast_start <= self.forecast_end:
            raise DataError("forecast_start must not be after forecast_end")


def snap_to_trading_day(dates: np.ndarray, day) -> int:
    """Row index of ``day`` or of the next trading date after it; ``len(dates)`` if beyond the end."""
    return int(np.searchsorted(dates, np.datetime64(day, "D"), side="left"))


def segment(frame: SeriesFrame, spec: SegmentationSpec) -> dict[str, np.ndarray]:
    """Split rows into train, context and forecast index sets.

    Context is the ``context_days`` trading rows immediately before the
    forecast start, and is carved out of whatever precedes it (training rows
    inside the context span are released to context).
    """
    dates = frame.dates
    tr0 = snap_to_trading_day(dates, spec.train_start)
    # train_end is inclusive: first row strictly after it
    tr1 = int(np.searchsorted(dates, spec.train_end, side="right"))
    f0 = snap_to_trading_day(dates, spec.forecast_start)
    f1 = int(np.searchsorted(dates, spec.forecast_end, side="right"))
    c0 = f0 - spec.context_days
    if c0 < 0:
        raise DataError("context span starts before the first row")
    tr1 = min(tr1, c0)
    train = np.arange(tr0, tr1)
    context = np.arange(c0, f0)
    forecast = np.arange(f0, f1)
    if train.size == 0:
        raise DataError("empty training segment")
    if forecast.size == 0:
        raise DataError("empty forecast segment")
    if spec.context_days > 0 and context.size == 0:
        raise DataError("empty context segment")
    return {"train": train, "context": context, "forecast": forecast}


def segment_by_counts(n_rows: int, train: int, context: int, forecast: int) -> dict[str, np.ndarray]:
    """Row-count segmentation of the last ``train + context + forecast`` rows."""
    total = train + context + forecast
    if min(train, forecast) < 1 or context < 0:
        raise DataError("train and forecast must be >= 1, context >= 0")
    if total > n_rows:
        raise DataError(f"segmentation needs {total} rows, frame has {n_rows}")
    start = n_rows - total
    return {
        "train": np.arange(start, start + train),
        "context": np.arange(start + train, start + train + context),
        "forecast": np.arange(start + train + context, n_rows),
    }
