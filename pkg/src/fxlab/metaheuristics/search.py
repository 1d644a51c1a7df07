from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .algorithms import ALGORITHMS, DEFAULTS, init_population, init_swarm, pso_step, variant_step
from .space import SearchSpace

logger = logging.getLogger(__name__)

Objective = Callable[[dict, int], float]


@dataclass
class OptimizeResult:
    best_point: dict
    best_position: np.ndarray
    best_fitness: float
    history: list[float]
    history_points: list[dict] = field(default_factory=list)
    n_evals: int = 0
    failures: int = 0

    def write_log(self, path: str | Path) -> None:
        """One row per iteration: iteration, best fitness, best point."""
        names = list(self.best_point)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "best_fitness", *names])
            for it, (f, pt) in enumerate(zip(self.history, self.history_points), start=1):
                w.writerow([it, repr(f), *(pt[n] for n in names)])


def particle_seed(run_seed: int, particle: int) -> int:
    """Evaluation seed for one particle; independent of evaluation order."""
    return int(np.random.SeedSequence([int(run_seed), int(particle)]).generate_state(1)[0])


class _Evaluator:
    def __init__(self, objective: Objective, space: SearchSpace, seed: int, map_fn=map):
        self.objective = objective
        self.space = space
        self.seed = seed
        self.map_fn = map_fn
        self.n_evals = 0
        self.failures = 0

    def _one(self, args):
        x, pid = args
        point = self.space.decode(x)
        try:
            f = float(self.objective(point, particle_seed(self.seed, pid)))
        except Exception as exc:  # a failing candidate must not stop the search
            logger.warning("objective failed at %s: %s", point, exc)
            return math.inf, True
        if math.isnan(f):
            logger.warning("objective returned NaN at %s", point)
            return math.inf, True
        return f, False

    def __call__(self, X: np.ndarray, ids) -> np.ndarray:
        out = list(self.map_fn(self._one, list(zip(X, ids))))
        self.n_evals += len(out)
        self.failures += sum(bad for _, bad in out)
        return np.array([f for f, _ in out], dtype=float)


def optimize(
    objective: Objective,
    space: SearchSpace,
    algo: str = "pso",
    swarm_size: int = 20,
    iterations: int = 30,
    seed: int = 0,
    options: dict | None = None,
    map_fn=map,
) -> OptimizeResult:
    """Minimize ``objective(point, seed)`` over ``space``.

    Iteration 1 evaluates the initial population; each further iteration is
    one algorithm step. ``history[i]`` is the incumbent best after iteration
    ``i + 1``. ``map_fn`` may be a parallel map; per-particle evaluation
    seeds make the result independent of evaluation order.
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    if iterations < 1 or swarm_size < 1:
        raise ValueError("iterations and swarm_size must be >= 1")
    opts = {**DEFAULTS[algo], **(options or {})}
    rng = np.random.default_rng(seed)
    ev = _Evaluator(objective, space, seed, map_fn)
    history: list[float] = []
    points: list[dict] = []

    if algo == "pso":
        swarm = init_swarm(space, swarm_size, rng, **opts)
        swarm.record(ev(swarm.X, np.arange(swarm_size)))
        history.append(swarm.gbest_f)
        points.append(space.decode(swarm.gbest))
        for _ in range(1, iterations):
            pso_step(swarm, rng)
            swarm.record(ev(swarm.X, np.arange(swarm_size)))
            history.append(swarm.gbest_f)
            points.append(space.decode(swarm.gbest))
        best_x, best_f = swarm.gbest, swarm.gbest_f
    else:
        pop = init_population(algo, space, swarm_size, rng, ev, iterations, **opts)
        history.append(pop.best_f)
        points.append(space.decode(pop.best_x))
        for _ in range(1, iterations):
            variant_step(pop, algo, rng, space, ev, **opts)
            history.append(pop.best_f)
            points.append(space.decode(pop.best_x))
        best_x, best_f = pop.best_x, pop.best_f

    return OptimizeResult(
        best_point=space.decode(best_x),
        best_position=best_x.copy(),
        best_fitness=float(best_f),
        history=history,
        history_points=points,
        n_evals=ev.n_evals,
        failures=ev.failures,
    )
