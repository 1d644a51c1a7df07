"""Forecast metrics, improvement rates, the Diebold-Mariano test and model ranking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .ingest import SeriesFrame


def _pair(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=float).ravel()
    p = np.asarray(predicted, dtype=float).ravel()
    if a.size != p.size:
        raise ValueError(f"length mismatch: {a.size} actual vs {p.size} predicted")
    if a.size == 0:
        raise ValueError("empty input")
    return a, p


def regression_metrics(actual, predicted) -> dict[str, float | None]:
    """MAE, MSE, RMSE and R^2. R^2 is ``None`` when the actuals are constant."""
    a, p = _pair(actual, predicted)
    err = a - p
    mae = float(np.mean(np.abs(err)))
    mse = float(np.mean(err * err))
    # scale by the largest error so squaring neither underflows nor overflows
    peak = float(np.max(np.abs(err)))
    rmse = peak * math.sqrt(float(np.mean((err / peak) ** 2))) if peak > 0 else 0.0
    ss_tot = float(np.sum((a - a.mean()) ** 2))
    r2 = None if ss_tot == 0.0 else 1.0 - float(np.sum(err * err)) / ss_tot
    return {"MAE": mae, "MSE": mse, "RMSE": rmse, "R2": r2}


@dataclass
class ClassificationReport:
    per_class: dict[int, dict[str, float]]
    macro: dict[str, float]
    weighted: dict[str, float]
    accuracy: float
    # (class, metric) pairs whose denominator was zero and were set to 0
    zero_division: list[tuple[int, str]] = field(default_factory=list)


def _safe_div(num: float, den: float, flag: list, key) -> float:
    if den == 0:
        flag.append(key)
        return 0.0
    return num / den


def classification_metrics(actual_labels, predicted_labels) -> ClassificationReport:
    """Per-class precision/recall/F1 for binary labels, with macro and support-weighted averages."""
    a = np.asarray(actual_labels).ravel()
    p = np.asarray(predicted_labels).ravel()
    if a.size != p.size:
        raise ValueError("length mismatch")
    if not (np.isin(a, (0, 1)).all() and np.isin(p, (0, 1)).all()):
        raise ValueError("labels must be 0 or 1")
    flags: list[tuple[int, str]] = []
    per_class = {}
    for c in (0, 1):
        tp = int(np.sum((p == c) & (a == c)))
        fp = int(np.sum((p == c) & (a != c)))
        fn = int(np.sum((p != c) & (a == c)))
        prec = _safe_div(tp, tp + fp, flags, (c, "precision"))
        rec = _safe_div(tp, tp + fn, flags, (c, "recall"))
        f1 = _safe_div(2 * prec * rec, prec + rec, flags, (c, "f1"))
        per_class[c] = {"precision": prec, "recall": rec, "f1": f1, "support": tp + fn}
    keys = ("precision", "recall", "f1")
    macro = {k: (per_class[0][k] + per_class[1][k]) / 2 for k in keys}
    total = per_class[0]["support"] + per_class[1]["support"]
    if total:
        weighted = {
            k: (per_class[0][k] * per_class[0]["support"] + per_class[1][k] * per_class[1]["support"]) / total
            for k in keys
        }
    else:
        weighted = dict.fromkeys(keys, 0.0)
    accuracy = float(np.mean(a == p)) if a.size else 0.0
    return ClassificationReport(per_class, macro, weighted, accuracy, flags)


def improvement_rate(metric_financial: float, metric_combined: float) -> float:
    """(financial - combined) / financial; positive means adding text helped."""
    if metric_financial == 0:
        raise ZeroDivisionError("financial-only metric is zero")
    return (metric_financial - metric_combined) / metric_financial


@dataclass(frozen=True)
class DMResult:
    statistic: float
    p_value: float


def dm_test(errors_a, errors_b, loss: str = "squared", horizon: int = 1) -> DMResult:
    """Diebold-Mariano test of equal predictive accuracy.

    Negative statistics favour ``errors_a``. The long-run variance of the loss
    differential uses Bartlett weights truncated at ``horizon - 1`` lags and
    the statistic carries the Harvey-Leybourne-Newbold small-sample factor;
    the p-value is two-sided from Student t with T-1 degrees of freedom.
    """
    ea = np.asarray(errors_a, dtype=float).ravel()
    eb = np.asarray(errors_b, dtype=float).ravel()
    if ea.size != eb.size:
        raise ValueError("error series must have equal length")
    T = ea.size
    if T < 10:
        raise ValueError("DM test needs at least 10 observations")
    if horizon < 1 or horizon >= T:
        raise ValueError("horizon must be in [1, T)")
    if loss == "squared":
        d = ea * ea - eb * eb
    elif loss == "absolute":
        d = np.abs(ea) - np.abs(eb)
    else:
        raise ValueError(f"unknown loss {loss!r}")

    if not np.any(d):
        return DMResult(0.0, 1.0)
    dbar = float(np.mean(d))
    dc = d - dbar
    lrv = float(np.dot(dc, dc)) / T
    for k in range(1, horizon):
        weight = 1.0 - k / horizon
        lrv += 2.0 * weight * float(np.dot(dc[k:], dc[:-k])) / T
    harvey = math.sqrt((T + 1 - 2 * horizon + horizon * (horizon - 1) / T) / T)
    if lrv <= 0.0:
        if dbar == 0.0:
            return DMResult(0.0, 1.0)
        return DMResult(math.copysign(math.inf, dbar), 0.0)
    stat = harvey * dbar / math.sqrt(lrv / T)
    p = 2.0 * float(stats.t.sf(abs(stat), df=T - 1))
    return DMResult(stat, min(p, 1.0))


def _average_ranks(values: Sequence[float]) -> list[float]:
    """Rank 1 = smallest; ties share the mean of the ranks they span."""
    return [float(r) for r in stats.rankdata(values, method="average")]


@dataclass
class RankTable:
    models: list[str]
    metrics: list[str]
    values: dict[str, dict[str, float | None]]
    ranks: dict[str, dict[str, float | None]]
    weighted_rank: dict[str, float | None]
    # (model, metric) pairs left out of a ranking because the value was missing
    excluded: list[tuple[str, str]] = field(default_factory=list)

    def rows(self) -> list[dict]:
        out = []
        for m in self.models:
            row = {"model": m}
            for k in self.metrics:
                row[k] = self.values[m].get(k)
                row[f"rank_{k}"] = self.ranks[m].get(k)
            row["weighted_rank"] = self.weighted_rank[m]
            out.append(row)
        return out


def rank_models(
    metric_table: Mapping[str, Mapping[str, float | None]],
    metrics: Sequence[str] = ("MAE", "RMSE"),
) -> RankTable:
    """Per-metric ranks (lower value ranks first) and their mean as the weighted rank."""
    if not metric_table:
        raise ValueError("metric table is empty")
    models = list(metric_table)
    ranks: dict[str, dict[str, float | None]] = {m: {} for m in models}
    excluded = []
    for k in metrics:
        present = []
        for m in models:
            v = metric_table[m].get(k)
            if v is None or not np.isfinite(v):
                excluded.append((m, k))
                ranks[m][k] = None
            else:
                present.append(m)
        if present:
            for m, r in zip(present, _average_ranks([metric_table[m][k] for m in present])):
                ranks[m][k] = r
    weighted = {}
    for m in models:
        rs = [ranks[m][k] for k in metrics if ranks[m][k] is not None]
        weighted[m] = float(np.mean(rs)) if rs else None
    values = {m: {k: metric_table[m].get(k) for k in metrics} for m in models}
    return RankTable(models, list(metrics), values, ranks, weighted, excluded)


def correlation_matrix(frame: SeriesFrame) -> tuple[list[str], np.ndarray]:
    """Pearson correlations; zero-variance columns get NaN rows/columns (reported absent)."""
    names = frame.names
    X = frame.values(names)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 observations per column")
    Xc = X - X.mean(axis=0)
    norms = np.sqrt(np.sum(Xc * Xc, axis=0))
    ok = norms > 0
    corr = np.full((len(names), len(names)), np.nan)
    Z = Xc[:, ok] / norms[ok]
    sub = np.clip(Z.T @ Z, -1.0, 1.0)
    sub = (sub + sub.T) / 2
    np.fill_diagonal(sub, 1.0)
    corr[np.ix_(ok, ok)] = sub
    return names, corr
