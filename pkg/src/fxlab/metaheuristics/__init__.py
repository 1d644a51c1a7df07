from .algorithms import (
    ALGORITHMS,
    DEFAULTS,
    Population,
    Swarm,
    init_population,
    init_swarm,
    levy_steps,
    pso_step,
    variant_step,
)
from .search import OptimizeResult, optimize, particle_seed
from .space import Dimension, SearchSpace, lstm_search_space, space_from_config

__all__ = [
    "ALGORITHMS",
    "DEFAULTS",
    "Dimension",
    "OptimizeResult",
    "Population",
    "SearchSpace",
    "Swarm",
    "init_population",
    "init_swarm",
    "levy_steps",
    "lstm_search_space",
    "optimize",
    "particle_seed",
    "pso_step",
    "space_from_config",
    "variant_step",
]
