"""Population updates for PSO, GA, cuckoo search, whale optimization and bat algorithm.

All algorithms minimize. Positions live in the internal box of a
:class:`SearchSpace`; every update ends by clamping to that box.
Updates that need fresh fitness values receive an ``evaluate`` callable
mapping an (n, d) array of positions to n fitness values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .space import SearchSpace

Evaluate = Callable[[np.ndarray, np.ndarray], np.ndarray]

ALGORITHMS = ("pso", "ga", "cs", "woa", "bat")

DEFAULTS = {
    "pso": {"w": 0.729, "c1": 1.49445, "c2": 1.49445, "vmax_frac": 0.2},
    "ga": {"crossover": 0.9, "mutation": 0.1, "mutation_scale": 0.1, "blend_alpha": 0.5,
           "tournament": 3, "elitism": True},
    "cs": {"abandon": 0.25, "step_scale": 1.0, "levy_beta": 1.5},
    "woa": {"spiral_b": 1.0},
    "bat": {"f_min": 0.0, "f_max": 2.0, "loudness": 1.0, "pulse_rate": 0.5,
            "alpha": 0.9, "gamma": 0.9, "walk_scale": 0.01},
}


@dataclass
class Population:
    """Positions, their fitness and the incumbent best; ``state`` holds per-algorithm arrays."""

    X: np.ndarray
    fitness: np.ndarray
    best_x: np.ndarray
    best_f: float
    iteration: int = 0
    max_iter: int = 1
    state: dict = field(default_factory=dict)

    def refresh_best(self) -> None:
        i = int(np.argmin(self.fitness))
        if self.fitness[i] < self.best_f:
            self.best_f = float(self.fitness[i])
            self.best_x = self.X[i].copy()


@dataclass
class Swarm:
    """PSO particle state: positions, velocities, personal and global bests."""

    X: np.ndarray
    V: np.ndarray
    pbest: np.ndarray
    pbest_f: np.ndarray
    gbest: np.ndarray
    gbest_f: float
    lower: np.ndarray
    upper: np.ndarray
    w: float = 0.729
    c1: float = 1.49445
    c2: float = 1.49445
    vmax_frac: float = 0.2

    def record(self, fitness: np.ndarray) -> None:
        """Update personal and global bests from fitness at the current positions."""
        better = fitness < self.pbest_f
        self.pbest[better] = self.X[better]
        self.pbest_f[better] = fitness[better]
        i = int(np.argmin(self.pbest_f))
        if self.pbest_f[i] < self.gbest_f:
            self.gbest_f = float(self.pbest_f[i])
            self.gbest = self.pbest[i].copy()


def init_swarm(space: SearchSpace, n: int, rng: np.random.Generator, **coef) -> Swarm:
    X = space.sample(rng, n)
    vmax = coef.get("vmax_frac", DEFAULTS["pso"]["vmax_frac"]) * space.span
    V = rng.uniform(-vmax, vmax, size=X.shape)
    return Swarm(
        X=X, V=V, pbest=X.copy(), pbest_f=np.full(n, np.inf),
        gbest=X[0].copy(), gbest_f=np.inf,
        lower=space.lower.copy(), upper=space.upper.copy(),
        **{k: v for k, v in coef.items() if k in ("w", "c1", "c2", "vmax_frac")},
    )


def pso_step(swarm: Swarm, rng: np.random.Generator | None = None, r1=None, r2=None) -> Swarm:
    """Move every particle once.

    V <- w*V + c1*r1*(pbest - X) + c2*r2*(gbest - X), then X <- X + V, with
    r1, r2 ~ U(0, 1) drawn per particle and dimension unless given. Velocity
    is clamped to +-vmax_frac of each dimension's range and positions to the
    box; a clamped position zeroes that velocity component.
    """
    n, d = swarm.X.shape
    if r1 is None:
        r1 = rng.random((n, d))
    if r2 is None:
        r2 = rng.random((n, d))
    V = (
        swarm.w * swarm.V
        + swarm.c1 * r1 * (swarm.pbest - swarm.X)
        + swarm.c2 * r2 * (swarm.gbest - swarm.X)
    )
    vmax = swarm.vmax_frac * (swarm.upper - swarm.lower)
    V = np.clip(V, -vmax, vmax)
    X = swarm.X + V
    hit = (X < swarm.lower) | (X > swarm.upper)
    X = np.clip(X, swarm.lower, swarm.upper)
    V = np.where(hit, 0.0, V)
    swarm.X, swarm.V = X, V
    return swarm


def init_population(algo: str, space: SearchSpace, n: int, rng, evaluate: Evaluate,
                    max_iter: int, **opts) -> Population:
    X = space.sample(rng, n)
    f = evaluate(X, np.arange(n))
    pop = Population(X, f, X[0].copy(), np.inf, iteration=1, max_iter=max_iter)
    pop.refresh_best()
    if algo == "bat":
        o = {**DEFAULTS["bat"], **opts}
        pop.state["V"] = np.zeros_like(X)
        pop.state["A"] = np.full(n, float(o["loudness"]))
        pop.state["r"] = np.zeros(n)
    return pop


def _ga_step(pop, space, rng, evaluate, crossover, mutation, mutation_scale,
             blend_alpha, tournament, elitism):
    n, d = pop.X.shape
    children = pop.X.copy()
    changed = np.zeros(n, dtype=bool)
    for i in range(n):
        contenders = rng.choice(n, size=min(tournament, n), replace=False)
        mate = pop.X[contenders[np.argmin(pop.fitness[contenders])]]
        if rng.random() < crossover:
            # BLX-alpha blend between the slot parent and the tournament mate
            lo = np.minimum(pop.X[i], mate)
            hi = np.maximum(pop.X[i], mate)
            ext = blend_alpha * (hi - lo)
            children[i] = rng.uniform(lo - ext, hi + ext)
            changed[i] = True
        genes = rng.random(d) < mutation
        if genes.any():
            children[i, genes] += rng.normal(0.0, mutation_scale * space.span[genes])
            changed[i] = True
    children = space.clip(children)
    if not changed.any():
        return pop
    idx = np.flatnonzero(changed)
    f_child = pop.fitness.copy()
    f_child[idx] = evaluate(children[idx], idx)
    if elitism:
        accept = f_child <= pop.fitness
    else:
        accept = np.ones(n, dtype=bool)
    pop.X = np.where(accept[:, None], children, pop.X)
    pop.fitness = np.where(accept, f_child, pop.fitness)
    return pop


def levy_steps(rng, shape, beta: float) -> np.ndarray:
    """Mantegna's algorithm for Levy-stable step lengths with index ``beta``."""
    num = math.gamma(1 + beta) * math.sin(math.pi * beta / 2)
    den = math.gamma((1 + beta) / 2) * beta * 2 ** ((beta - 1) / 2)
    sigma_u = (num / den) ** (1 / beta)
    u = rng.normal(0.0, sigma_u, size=shape)
    v = rng.normal(0.0, 1.0, size=shape)
    return u / np.abs(v) ** (1 / beta)


def _cs_step(pop, space, rng, evaluate, abandon, step_scale, levy_beta):
    n, d = pop.X.shape
    # Levy flights scaled by each nest's distance to the incumbent best
    step = step_scale * levy_steps(rng, (n, d), levy_beta) * (pop.X - pop.best_x)
    new = space.clip(pop.X + step * rng.normal(size=(n, d)))
    f_new = evaluate(new, np.arange(n))
    better = f_new < pop.fitness
    pop.X[better] = new[better]
    pop.fitness[better] = f_new[better]
    pop.refresh_best()
    # the worst fraction of nests is abandoned and rebuilt anywhere in the box;
    # the best nest always survives
    k = int(math.floor(abandon * (n - 1)))
    if k > 0:
        idx = np.argsort(pop.fitness, kind="stable")[n - k:]
        pop.X[idx] = space.sample(rng, k)
        pop.fitness[idx] = evaluate(pop.X[idx], idx)
    return pop


def _woa_step(pop, space, rng, evaluate, spiral_b):
    n, d = pop.X.shape
    a = 2.0 - 2.0 * (pop.iteration - 1) / max(pop.max_iter - 1, 1)
    best = pop.best_x
    new = pop.X.copy()
    for i in range(n):
        A = 2.0 * a * rng.random() - a
        C = 2.0 * rng.random()
        p = rng.random()
        l = rng.uniform(-1.0, 1.0)
        if p < 0.5:
            if abs(A) < 1.0:
                # shrinking encirclement of the best whale
                new[i] = best - A * np.abs(C * best - pop.X[i])
            else:
                ref = pop.X[rng.integers(n)]
                new[i] = ref - A * np.abs(C * ref - pop.X[i])
        else:
            dist = np.abs(best - pop.X[i])
            new[i] = dist * math.exp(spiral_b * l) * math.cos(2 * math.pi * l) + best
    pop.X = space.clip(new)
    pop.fitness = evaluate(pop.X, np.arange(n))
    return pop


def _bat_step(pop, space, rng, evaluate, f_min, f_max, loudness, pulse_rate,
              alpha, gamma, walk_scale):
    n, d = pop.X.shape
    V, A, r = pop.state["V"], pop.state["A"], pop.state["r"]
    freq = f_min + (f_max - f_min) * rng.random(n)
    V = V + (pop.X - pop.best_x) * freq[:, None]
    cand = pop.X + V
    local = rng.random(n) > r
    if local.any():
        # local random walk around the best, scaled by mean loudness
        cand[local] = pop.best_x + walk_scale * space.span * A.mean() * rng.uniform(
            -1.0, 1.0, size=(int(local.sum()), d)
        )
    cand = space.clip(cand)
    f_new = evaluate(cand, np.arange(n))
    accept = (f_new <= pop.fitness) & (rng.random(n) < A)
    pop.X[accept] = cand[accept]
    pop.fitness[accept] = f_new[accept]
    A[accept] *= alpha
    r[accept] = pulse_rate * (1.0 - math.exp(-gamma * pop.iteration))
    # the incumbent is refreshed from every evaluated candidate
    j = int(np.argmin(f_new))
    if f_new[j] < pop.best_f:
        pop.best_f = float(f_new[j])
        pop.best_x = cand[j].copy()
    pop.state["V"] = V
    return pop


_STEPS = {"ga": _ga_step, "cs": _cs_step, "woa": _woa_step, "bat": _bat_step}


def variant_step(pop: Population, algo: str, rng: np.random.Generator, space: SearchSpace,
                 evaluate: Evaluate, **opts) -> Population:
    """One generation of GA, CS, WOA or BAT; updates the incumbent best."""
    if algo not in _STEPS:
        raise ValueError(f"unknown variant {algo!r}; expected one of {sorted(_STEPS)}")
    settings = {**DEFAULTS[algo], **opts}
    pop.iteration += 1
    pop = _STEPS[algo](pop, space, rng, evaluate, **settings)
    pop.refresh_best()
    return pop
