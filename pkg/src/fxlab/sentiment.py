"""Daily sentiment values and the exponentially decaying sentiment index."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .ingest import DataError, DocumentRecord, SeriesFrame, snap_to_trading_day


def daily_sentiment_value(
    docs: Sequence[DocumentRecord],
    category: str,
    dates: np.ndarray,
    score: str = "sentiment",
) -> np.ndarray:
    """Mean document score per trading day; days without documents are 0.

    Documents dated on non-trading days count toward the next trading date;
    documents after the last date are dropped.
    """
    dates = np.asarray(dates, dtype="datetime64[D]")
    total = np.zeros(dates.size)
    count = np.zeros(dates.size)
    scored = 0
    for d in docs:
        if d.category != category or score not in d.scores:
            continue
        scored += 1
        i = snap_to_trading_day(dates, d.date)
        if i < dates.size:
            total[i] += d.scores[score]
            count[i] += 1
    if scored == 0:
        raise DataError(f"no {category} documents carry a {score!r} score")
    out = np.zeros(dates.size)
    np.divide(total, count, out=out, where=count > 0)
    return out


def sentiment_index(sv, decay_scale: float = 7.0, window: int | None = None) -> np.ndarray:
    """SI_t = sum_{i<t} exp(-(t-i)/decay_scale) * SV_i + SV_t.

    Evaluated with the recurrence SI_t = exp(-1/decay_scale) * SI_{t-1} + SV_t.
    ``window`` truncates history to the last ``window`` days for sensitivity
    runs; ``None`` sums the full history.
    """
    if decay_scale <= 0:
        raise ValueError("decay_scale must be positive")
    sv = np.asarray(sv, dtype=float)
    if window is not None:
        return sentiment_index_direct(sv, decay_scale, window)
    rho = np.exp(-1.0 / decay_scale)
    si = np.empty_like(sv)
    acc = 0.0
    for t in range(sv.size):
        acc = rho * acc + sv[t]
        si[t] = acc
    return si


def sentiment_index_direct(sv, decay_scale: float = 7.0, window: int | None = None) -> np.ndarray:
    """Explicit weighted sum over past days (O(n^2)); reference form of the index."""
    sv = np.asarray(sv, dtype=float)
    n = sv.size
    si = np.empty(n)
    for t in range(n):
        lo = 0 if window is None else max(0, t - window)
        lags = t - np.arange(lo, t)
        si[t] = float(np.sum(np.exp(-lags / decay_scale) * sv[lo:t])) + sv[t]
    return si


def sentiment_frame(
    docs: Sequence[DocumentRecord],
    dates: np.ndarray,
    decay_scale: float = 7.0,
    window: int | None = None,
) -> SeriesFrame:
    """Columns ``sv_news``, ``si_news``, ``sv_analysis``, ``si_analysis``."""
    cols = {}
    for cat in ("news", "analysis"):
        sv = daily_sentiment_value(docs, cat, dates)
        cols[f"sv_{cat}"] = sv
        cols[f"si_{cat}"] = sentiment_index(sv, decay_scale, window)
    return SeriesFrame(dates, cols)
