"""Sub-linear-query set cover toolkit.

Core pieces: a dual-table incidence model with two query-counted oracles
(j-th element of a set / j-th set containing an element), greedy and
exact offline solvers, three sub-linear algorithms built on element and
set sampling, generators and checkers for hard instance families
(median/modified, compounds, slabs), and a seeded benchmark harness.
"""

from .core import (
    BudgetExhausted,
    Cover,
    CoverCheck,
    DualityError,
    InfeasibleError,
    Oracle,
    ParseError,
    PreconditionError,
    SetCoverError,
    SetSystem,
    SwapRecord,
    TooLargeError,
    apply_swap,
    read_instance,
    verify_cover_naive,
    write_instance,
)
from .rng import stream, substream
from .solvers import (
    BruteForceResult,
    RunReport,
    SolverConfig,
    brute_force_min_cover,
    element_sample,
    greedy_cover,
    harmonic,
    iter_set_cover,
    large_set_cover,
    offline_sc,
    rho_greedy,
    set_sample,
    small_set_cover,
    sublinear_set_cover,
)
from . import lowerbound
from . import harness

__version__ = "0.1.0"

__all__ = [
    "BruteForceResult",
    "BudgetExhausted",
    "Cover",
    "CoverCheck",
    "DualityError",
    "InfeasibleError",
    "Oracle",
    "ParseError",
    "PreconditionError",
    "RunReport",
    "SetCoverError",
    "SetSystem",
    "SolverConfig",
    "SwapRecord",
    "TooLargeError",
    "apply_swap",
    "brute_force_min_cover",
    "element_sample",
    "greedy_cover",
    "harmonic",
    "harness",
    "iter_set_cover",
    "large_set_cover",
    "lowerbound",
    "offline_sc",
    "read_instance",
    "rho_greedy",
    "set_sample",
    "small_set_cover",
    "stream",
    "sublinear_set_cover",
    "substream",
    "verify_cover_naive",
    "write_instance",
]
