"""Pytest fixtures for freefam tests."""

import numpy as np
import pytest

from freefam.cumulants import RationalVarianceFunction
from freefam.measures import Measure, semicircle_measure


@pytest.fixture  # type: ignore[untyped-decorator]
def semicircle() -> Measure:
    """Standard semicircle law on [-2, 2]."""
    return semicircle_measure()


@pytest.fixture  # type: ignore[untyped-decorator]
def unit_variance() -> RationalVarianceFunction:
    """V = 1: the semicircle family."""
    return RationalVarianceFunction.constant(1.0)


@pytest.fixture  # type: ignore[untyped-decorator]
def poisson_variance() -> RationalVarianceFunction:
    """V = 1 + m: the free Poisson family."""
    return RationalVarianceFunction(num=(1.0, 1.0))


@pytest.fixture  # type: ignore[untyped-decorator]
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)
