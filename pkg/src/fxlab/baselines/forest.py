"""Random-forest importances and recursive feature elimination."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from sklearn.ensemble import RandomForestRegressor

logger = logging.getLogger(__name__)


def forest_importance(X, y, n_trees: int = 100, max_depth: int | None = 6, seed: int = 0) -> np.ndarray:
    """Total variance reduction per feature over bagged regression trees, normalized to sum 1.

    A constant target gives uniform importances.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float).ravel()
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    d = X.shape[1]
    if np.ptp(y) == 0:
        return np.full(d, 1.0 / d)
    forest = RandomForestRegressor(
        n_estimators=n_trees, max_depth=max_depth, max_features=1.0,
        bootstrap=True, random_state=seed,
    )
    forest.fit(X, y)
    imp = np.asarray(forest.feature_importances_, dtype=float)
    total = imp.sum()
    if not np.isfinite(total) or total <= 0:
        return np.full(d, 1.0 / d)
    return imp / total


def rfe(
    X, y, names: Sequence[str], n_keep: int, step: int = 1,
    n_trees: int = 100, max_depth: int | None = 6, seed: int = 0,
) -> list[str]:
    """Drop the ``step`` least important features per round until ``n_keep`` remain.

    Columns are put in name order before fitting and ties are broken by name,
    so the selection does not depend on the incoming column order.
    """
    X = np.asarray(X, dtype=float)
    names = list(names)
    if X.shape[1] != len(names):
        raise ValueError("one name per column required")
    if not 1 <= n_keep <= len(names):
        raise ValueError(f"n_keep must be in [1, {len(names)}]")
    if step < 1:
        raise ValueError("step must be >= 1")
    col = {n: X[:, i] for i, n in enumerate(names)}
    remaining = sorted(names)
    while len(remaining) > n_keep:
        imp = forest_importance(np.column_stack([col[n] for n in remaining]), y,
                                n_trees, max_depth, seed)
        order = sorted(range(len(remaining)), key=lambda i: (imp[i], remaining[i]))
        k = min(step, len(remaining) - n_keep)
        dropped = {remaining[i] for i in order[:k]}
        logger.debug("rfe drops %s", sorted(dropped))
        remaining = [n for n in remaining if n not in dropped]
    return remaining
