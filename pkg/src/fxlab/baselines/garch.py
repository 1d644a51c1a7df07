"""AR(1)-GARCH(1,1) fitted by Gaussian maximum likelihood with the Nelder-Mead simplex."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

PENALTY = 1e10


class GarchFitError(RuntimeError):
    def __init__(self, message: str, best_params: np.ndarray | None = None):
        super().__init__(message)
        self.best_params = best_params


@dataclass(frozen=True)
class Garch11:
    """r_t = mu + phi r_{t-1} + e_t, sigma2_t = omega + alpha e_{t-1}^2 + beta sigma2_{t-1}."""

    mu: float
    phi: float
    omega: float
    alpha: float
    beta: float
    loglik: float
    last_return: float
    last_resid: float
    last_sigma2: float
    n_evals: int = 0

    @property
    def params(self) -> np.ndarray:
        return np.array([self.mu, self.phi, self.omega, self.alpha, self.beta])


def _variance_path(resid: np.ndarray, omega: float, alpha: float, beta: float, s0: float) -> np.ndarray:
    """Conditional variances sigma2_1..sigma2_n, seeded with sigma2_1 = s0."""
    x = omega + alpha * resid[:-1] ** 2
    tail = lfilter([1.0], [1.0, -beta], x, zi=[beta * s0])[0]
    return np.concatenate([[s0], tail])


def _neg_loglik(theta, r: np.ndarray, s0: float) -> float:
    mu, phi, omega, alpha, beta = theta
    if omega <= 0 or alpha < 0 or beta < 0 or alpha + beta >= 1 or abs(phi) >= 1:
        return PENALTY * (1 + max(0.0, -omega) + max(0.0, -alpha) + max(0.0, -beta)
                          + max(0.0, alpha + beta - 1) + max(0.0, abs(phi) - 1))
    resid = r[1:] - mu - phi * r[:-1]
    s2 = _variance_path(resid, omega, alpha, beta, s0)
    if np.any(s2 <= 0) or not np.all(np.isfinite(s2)):
        return PENALTY
    return 0.5 * float(np.sum(np.log(2 * np.pi) + np.log(s2) + resid ** 2 / s2))


def fit_garch11(returns, max_evals: int = 20000, tol: float = 1e-8) -> Garch11:
    """Maximize the Gaussian log-likelihood; constraint violations are penalized.

    The variance recursion starts at the sample variance of the returns.
    Raises ValueError for fewer than 100 or constant returns.
    Raises :class:`GarchFitError` (with the best parameters found) when the
    simplex does not converge within ``max_evals`` function evaluations.
    """
    r = np.asarray(returns, dtype=float)
    if r.size < 100:
        raise ValueError("GARCH fit needs at least 100 returns")
    var = float(np.var(r))
    if np.ptp(r) == 0.0:
        raise ValueError("returns have zero variance")
    x0 = np.array([float(np.mean(r)), 0.0, 0.1 * var, 0.1, 0.8])
    res = minimize(
        _neg_loglik, x0, args=(r, var), method="Nelder-Mead",
        options={"maxfev": max_evals, "maxiter": max_evals, "xatol": tol, "fatol": tol,
                 "adaptive": True},
    )
    # restart from the optimum once: Nelder-Mead simplices can collapse early
    res = minimize(
        _neg_loglik, res.x, args=(r, var), method="Nelder-Mead",
        options={"maxfev": max_evals, "maxiter": max_evals, "xatol": tol, "fatol": tol,
                 "adaptive": True},
    )
    if not res.success or res.fun >= PENALTY:
        raise GarchFitError(f"Nelder-Mead did not converge: {res.message}", res.x)
    mu, phi, omega, alpha, beta = (float(v) for v in res.x)
    resid = r[1:] - mu - phi * r[:-1]
    s2 = _variance_path(resid, omega, alpha, beta, var)
    return Garch11(
        mu, phi, omega, alpha, beta, -float(res.fun),
        last_return=float(r[-1]), last_resid=float(resid[-1]), last_sigma2=float(s2[-1]),
        n_evals=int(res.nfev),
    )


def forecast_garch(model: Garch11, steps: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Mean and conditional-variance forecasts for the next ``steps`` periods."""
    means, variances = [], []
    r_prev = model.last_return
    s2 = model.omega + model.alpha * model.last_resid ** 2 + model.beta * model.last_sigma2
    for h in range(steps):
        m = model.mu + model.phi * r_prev
        means.append(m)
        variances.append(s2)
        r_prev = m
        # E[e^2] = sigma2 beyond the first step
        s2 = model.omega + (model.alpha + model.beta) * s2
    return np.asarray(means), np.asarray(variances)


def one_step_garch_mean(model: Garch11, returns, rows) -> np.ndarray:
    r = np.asarray(returns, dtype=float)
    return np.asarray([model.mu + model.phi * r[i - 1] for i in rows])


def simulate_garch11(n: int, omega: float, alpha: float, beta: float, rng: np.random.Generator,
                     mu: float = 0.0, phi: float = 0.0, burn: int = 500) -> np.ndarray:
    s2 = omega / (1.0 - alpha - beta)
    e_prev = 0.0
    r_prev = 0.0
    out = np.empty(n + burn)
    z = rng.standard_normal(n + burn)
    for t in range(n + burn):
        s2 = omega + alpha * e_prev ** 2 + beta * s2
        e = math.sqrt(s2) * z[t]
        out[t] = mu + phi * r_prev + e
        e_prev, r_prev = e, out[t]
    return out[burn:]
