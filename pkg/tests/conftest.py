"""Shared fixtures: verified hard instances are expensive, build once."""

import pytest

from subcover.lowerbound import MedianParams, gen_median_instance
from subcover.rng import stream


@pytest.fixture(scope="session")
def median300():
    """A 300x300 accepted median instance, all six properties exact."""
    draw = gen_median_instance(
        MedianParams(m=300, n=300), stream(101, "gen/median"), mode="exact"
    )
    assert draw.report.passed
    return draw.system


@pytest.fixture(scope="session")
def general_median():
    """An accepted general-variant instance (k=2, alpha=1.01)."""
    params = MedianParams(m=500, n=5000, variant="general", k=2, alpha=1.01)
    draw = gen_median_instance(params, stream(202, "gen/median"), max_attempts=10)
    assert draw.report.passed
    return draw.system, params
