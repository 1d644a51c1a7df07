"""ARIMA(p, d, 0): autoregression on a (possibly once-differenced) series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linear import least_squares


@dataclass(frozen=True)
class ArModel:
    p: int
    d: int
    phi: np.ndarray  # lag coefficients, phi[0] on the most recent value
    intercept: float
    ridge: bool = False


def fit_ar(series, p: int = 1, d: int = 0) -> ArModel:
    y = np.asarray(series, dtype=float)
    if p < 1:
        raise ValueError("p must be >= 1")
    if d not in (0, 1):
        raise ValueError("d must be 0 or 1")
    z = np.diff(y) if d == 1 else y
    if z.size < p + 2:
        raise ValueError(f"series too short for AR({p}) with d={d}")
    X = np.column_stack([np.ones(z.size - p)] + [z[p - 1 - j:z.size - 1 - j] for j in range(p)])
    coef, ridge = least_squares(X, z[p:])
    return ArModel(p, d, coef[1:].copy(), float(coef[0]), ridge)


def forecast_ar(model: ArModel, history, steps: int = 1) -> np.ndarray:
    """Iterated forecasts in levels from the end of ``history``."""
    y = np.asarray(history, dtype=float)
    z = np.diff(y) if model.d == 1 else y
    if z.size < model.p:
        raise ValueError("history too short")
    buf = list(z[-model.p:])
    level = y[-1]
    out = []
    for _ in range(steps):
        nxt = model.intercept + sum(model.phi[j] * buf[-1 - j] for j in range(model.p))
        buf.append(nxt)
        if model.d == 1:
            level = level + nxt
            out.append(level)
        else:
            out.append(nxt)
    return np.asarray(out)


def one_step_ar(model: ArModel, series, rows) -> np.ndarray:
    y = np.asarray(series, dtype=float)
    return np.asarray([forecast_ar(model, y[:r], 1)[0] for r in rows])
