from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RIDGE_LAMBDA = 1e-8


@dataclass(frozen=True)
class LinearModel:
    coef: np.ndarray
    intercept: float
    ridge: bool = False


def least_squares(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, bool]:
    """OLS solution of ``X b = y``; falls back to ridge (lambda=1e-8) when X is rank deficient.

    ``y`` may be a vector or a matrix of several right-hand sides.
    Returns the coefficients and whether the fallback was used.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] >= X.shape[1] and np.linalg.matrix_rank(X) == X.shape[1]:
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        return coef, False
    XtX = X.T @ X + RIDGE_LAMBDA * np.eye(X.shape[1])
    return np.linalg.solve(XtX, X.T @ y), True


def fit_linear(X, y, intercept: bool = True) -> LinearModel:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise ValueError("X and y have different numbers of rows")
    if intercept:
        coef, ridge = least_squares(np.column_stack([np.ones(len(y)), X]), y)
        return LinearModel(coef[1:], float(coef[0]), ridge)
    coef, ridge = least_squares(X, y)
    return LinearModel(coef, 0.0, ridge)


def predict_linear(model: LinearModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X @ model.coef + model.intercept
