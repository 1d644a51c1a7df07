from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

KINDS = ("integer", "continuous", "log-continuous", "choice")


@dataclass(frozen=True)
class Dimension:
    """One search dimension.

    Optimizers move in an internal continuous coordinate: the raw value for
    ``integer``/``continuous``, log10 of the value for ``log-continuous``, and
    the option index in ``[0, len(choices))`` for ``choice``. Rounding happens
    only when a point is decoded for evaluation.
    """

    name: str
    kind: str
    lower: float = 0.0
    upper: float = 1.0
    choices: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dimension kind {self.kind!r}")
        if self.kind == "choice":
            if len(self.choices) < 1:
                raise ValueError(f"{self.name}: choice dimension needs options")
            return
        if not self.lower < self.upper:
            raise ValueError(f"{self.name}: lower must be < upper")
        if self.kind == "log-continuous" and self.lower <= 0:
            raise ValueError(f"{self.name}: log-continuous bounds must be positive")

    @property
    def box(self) -> tuple[float, float]:
        if self.kind == "log-continuous":
            return math.log10(self.lower), math.log10(self.upper)
        if self.kind == "choice":
            return 0.0, float(len(self.choices))
        if self.kind == "integer":
            # widen by half a unit so both end values are reachable by rounding
            return self.lower - 0.5 + 1e-9, self.upper + 0.5 - 1e-9
        return self.lower, self.upper

    def decode(self, u: float):
        if self.kind == "continuous":
            return float(u)
        if self.kind == "log-continuous":
            return float(10.0 ** u)
        if self.kind == "integer":
            return int(min(max(round(u), self.lower), self.upper))
        return self.choices[min(int(math.floor(u)), len(self.choices) - 1)]


class SearchSpace:
    def __init__(self, dims: Sequence[Dimension]):
        self.dims = list(dims)
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ValueError("dimension names must be unique")
        self.lower = np.array([d.box[0] for d in self.dims])
        self.upper = np.array([d.box[1] for d in self.dims])

    @classmethod
    def box(cls, n_dim: int, lower: float, upper: float) -> "SearchSpace":
        return cls([Dimension(f"x{i}", "continuous", lower, upper) for i in range(n_dim)])

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> list[str]:
        return [d.name for d in self.dims]

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, X: np.ndarray) -> np.ndarray:
        return np.clip(X, self.lower, self.upper)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, len(self)))

    def decode(self, x: np.ndarray) -> dict:
        return {d.name: d.decode(u) for d, u in zip(self.dims, x)}

    def encode(self, point: dict) -> np.ndarray:
        out = []
        for d in self.dims:
            v = point[d.name]
            if d.kind == "log-continuous":
                out.append(math.log10(v))
            elif d.kind == "choice":
                out.append(d.choices.index(v) + 0.5)
            else:
                out.append(float(v))
        return self.clip(np.asarray(out))


def lstm_search_space() -> SearchSpace:
    """Default hyperparameter box for recurrent forecasters."""
    return SearchSpace(
        [
            Dimension("hidden_units", "integer", 8, 128),
            Dimension("timesteps", "integer", 2, 30),
            Dimension("learning_rate", "log-continuous", 1e-4, 1e-1),
            Dimension("batch_size", "choice", choices=(8, 16, 32, 64)),
        ]
    )


def space_from_config(entries: Sequence[dict]) -> SearchSpace:
    dims = []
    for e in entries:
        if e["kind"] == "choice":
            dims.append(Dimension(e["name"], "choice", choices=tuple(e["choices"])))
        else:
            dims.append(Dimension(e["name"], e["kind"], float(e["lower"]), float(e["upper"])))
    return SearchSpace(dims)
