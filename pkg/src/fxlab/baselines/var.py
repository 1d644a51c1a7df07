"""Vector autoregression by per-equation least squares, and information-criterion lag selection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np


class SingularRegressorError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class VarModel:
    """y_t = intercept + sum_j coefs[j] @ y_{t-1-j} + e_t."""

    p: int
    coefs: np.ndarray  # (p, K, K)
    intercept: np.ndarray  # (K,)
    sigma: np.ndarray  # (K, K) residual covariance (divided by T)
    nobs: int

    @property
    def k_vars(self) -> int:
        return int(self.intercept.size)

    @property
    def n_params(self) -> int:
        K = self.k_vars
        return K * (K * self.p + 1)


def _lag_design(Y: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    T = Y.shape[0] - p
    X = np.ones((T, 1 + Y.shape[1] * p))
    for j in range(p):
        X[:, 1 + j * Y.shape[1]:1 + (j + 1) * Y.shape[1]] = Y[p - 1 - j:Y.shape[0] - 1 - j]
    return X, Y[p:]


def fit_var(data, p: int) -> VarModel:
    """Fit VAR(p) to a (T, K) array (or a 1-D series, K=1)."""
    Y = np.asarray(data, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if p < 1:
        raise ValueError("lag order p must be >= 1")
    X, Z = _lag_design(Y, p)
    if X.shape[0] <= X.shape[1] or np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularRegressorError(f"VAR({p}) regressor matrix is singular")
    B, *_ = np.linalg.lstsq(X, Z, rcond=None)
    resid = Z - X @ B
    T = Z.shape[0]
    sigma = resid.T @ resid / T
    K = Y.shape[1]
    coefs = np.stack([B[1 + j * K:1 + (j + 1) * K].T for j in range(p)])
    return VarModel(p, coefs, B[0].copy(), (sigma + sigma.T) / 2, T)


def forecast_var(model: VarModel, history, steps: int = 1) -> np.ndarray:
    """Iterated forecasts from the last ``p`` rows of ``history``; shape (steps, K)."""
    H = np.asarray(history, dtype=float)
    if H.ndim == 1:
        H = H[:, None]
    if H.shape[0] < model.p:
        raise ValueError(f"history has {H.shape[0]} rows, VAR({model.p}) needs {model.p}")
    buf = list(H[-model.p:])
    out = []
    for _ in range(steps):
        y = model.intercept.copy()
        for j in range(model.p):
            y = y + model.coefs[j] @ buf[-1 - j]
        out.append(y)
        buf.append(y)
    return np.asarray(out)


def one_step_var(model: VarModel, data, rows) -> np.ndarray:
    """One-step forecasts of every row in ``rows`` from the actual preceding rows."""
    Y = np.asarray(data, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    return np.asarray([forecast_var(model, Y[:r], 1)[0] for r in rows])


def information_criterion(model: VarModel, criterion: str = "AIC") -> float:
    """ln det(Sigma) + penalty * k / T with k the fitted parameter count."""
    sign, logdet = np.linalg.slogdet(model.sigma)
    if sign <= 0:
        return -math.inf
    T = model.nobs
    if criterion == "AIC":
        return logdet + 2.0 * model.n_params / T
    if criterion == "BIC":
        return logdet + math.log(T) * model.n_params / T
    raise ValueError(f"unknown criterion {criterion!r}")


def select_lag(target, indicator, max_lag: int, criterion: str = "AIC") -> tuple[int, dict[int, float]]:
    """Pick the bivariate VAR lag minimizing AIC or BIC.

    Every candidate is fitted on the same sample (the first ``max_lag``
    observations serve only as presample) so criteria are comparable.
    Ties go to the smaller lag.
    """
    Y = np.column_stack([np.asarray(target, float), np.asarray(indicator, float)])
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if Y.shape[0] <= max_lag * Y.shape[1] + 10:
        raise ValueError("series too short for the requested max_lag")
    values = {}
    for p in range(1, max_lag + 1):
        model = fit_var(Y[max_lag - p:], p)
        values[p] = information_criterion(model, criterion)
    best = min(values, key=lambda p: (values[p], p))
    return best, values


def lag_report(
    target, indicators: dict[str, np.ndarray], max_lag: int, criterion: str = "AIC",
    path: str | Path | None = None,
) -> list[dict]:
    """(variable, lag, criterion value) per indicator; written as CSV when ``path`` is given."""
    rows = []
    for name, series in indicators.items():
        p, vals = select_lag(target, series, max_lag, criterion)
        rows.append({"variable": name, "lag": p, criterion: vals[p], "system": "bivariate"})
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["variable", "lag", criterion, "system"])
            w.writeheader()
            for r in rows:
                w.writerow({**r, criterion: repr(r[criterion])})
    return rows


def var_forecast_column(data: np.ndarray, column: int, p: int, fit_rows: Sequence[int],
                        predict_rows: Sequence[int]) -> np.ndarray:
    """Fit on ``fit_rows`` (contiguous) and one-step forecast one column at ``predict_rows``."""
    fit_rows = np.asarray(fit_rows)
    model = fit_var(data[fit_rows[0]:fit_rows[-1] + 1], p)
    return one_step_var(model, data, predict_rows)[:, column]
