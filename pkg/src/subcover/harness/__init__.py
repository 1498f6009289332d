"""Experiment orchestration: planted instances, sweeps, CSV, CLI."""

from .planted import gen_planted_instance
from .experiments import ExperimentSpec, ResultRow, run_bench, solve_instance

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "gen_planted_instance",
    "run_bench",
    "solve_instance",
]
