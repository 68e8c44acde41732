"""Free convolution powers, the free CLT and the Marchenko-Pastur approximation.

Every free convolution here acts on cumulant sequences, where it is exact;
no density of a convolved law is ever materialized.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from .config import CONFIG
from .cumulants import (
    CumulantAction,
    CumulantSequence,
    RationalVarianceFunction,
    cumulants_from_variance,
    transform_cumulants,
)
from .moments import moments_from_cumulants
from .transforms import member_moments

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvergenceReport:
    grid: tuple[float, ...]
    distances: tuple[float, ...]
    slope: float | None

    def __post_init__(self) -> None:
        if len(self.grid) != len(self.distances):
            raise ValueError("grid and distances differ in length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:], strict=False)):
            raise ValueError("grid must be strictly increasing")
        if any(d < 0 for d in self.distances):
            raise ValueError("distances must be non-negative")

    @classmethod
    def from_distances(
        cls, grid: Sequence[float], distances: Sequence[float]
    ) -> "ConvergenceReport":
        """Attach a log-log slope; undefined (None) when any distance is 0."""
        slope: float | None = None
        if len(grid) >= 2 and all(d > 0 for d in distances):
            fit = np.polyfit(np.log(grid), np.log(distances), 1)
            slope = float(fit[0])
        return cls(tuple(float(g) for g in grid), tuple(float(d) for d in distances), slope)

    def to_dict(self) -> dict[str, Any]:
        return {"grid": list(self.grid), "distances": list(self.distances), "slope": self.slope}


def _check_grid(grid: Sequence[float]) -> None:
    if not grid:
        raise ValueError("lambda grid is empty")
    if any(lam < 1 for lam in grid):
        raise ValueError("lambda grid values must be >= 1")
    if any(b <= a for a, b in zip(grid, grid[1:], strict=False)):
        raise ValueError("lambda grid must be strictly increasing")


def reproductive_family(
    variance: RationalVarianceFunction,
    lam: float,
    order: int | None = None,
    formal: bool = False,
) -> CumulantSequence:
    """Cumulants of D_lam(nu^(boxplus lam)), the generator of the family V/lam."""
    if lam <= 0:
        raise ValueError("power must be positive")
    if lam < 1 and not formal:
        raise ValueError("power below 1 requires formal=True")
    base = cumulants_from_variance(variance, order)
    powered = transform_cumulants(base, CumulantAction.POWER, lam=lam)
    expected = cumulants_from_variance(variance.scaled(lam), base.order)
    for got, want in zip(powered.values, expected.values, strict=True):
        if abs(got - want) > 1e-9 * max(1.0, abs(want)):
            raise RuntimeError(f"reproductive identity violated: {got!r} != {want!r}")
    return powered


def clt_cumulants(c: CumulantSequence, n: int) -> CumulantSequence:
    """Cumulants of D_sqrt(n)(nu^(boxplus n)): c_k -> c_k n^(1 - k/2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if abs(c.values[0]) > CONFIG.tol:
        raise ValueError("generator must be centered")
    return CumulantSequence(
        tuple(v * n ** (1 - k / 2) for k, v in enumerate(c.values, start=1)), c.formal
    )


def mp_approximation(
    variance: RationalVarianceFunction,
    lam_grid: Sequence[float],
    m: float,
    order: int = 8,
) -> ConvergenceReport:
    """Moment distance between sqrt(lam)(Y_lam - m0) and the Marchenko-Pastur member.

    Y_lam is the member with mean m0 + m/sqrt(lam) of the family V/lam. Its
    rescaling belongs to the family u -> V(m0 + u/sqrt(lam)) anchored at 0,
    whose generator is the centered, sqrt(lam)-dilated nu_lam.
    """
    _check_grid(lam_grid)
    v0 = variance.anchor_value
    if abs(m) >= CONFIG.mp_window * math.sqrt(v0):
        raise ValueError("mean outside approximation window")
    target = member_moments(RationalVarianceFunction.constant(v0), m, order).values

    distances = []
    for lam in lam_grid:
        nu_lam = reproductive_family(variance, lam, order)
        generator = transform_cumulants(
            nu_lam.centered(), CumulantAction.DILATE, r=1.0 / math.sqrt(lam)
        )
        rescaled = variance.zoomed(1.0 / math.sqrt(lam))
        got = member_moments(rescaled, m, order, moments_from_cumulants(generator, order)).values
        distance = max(abs(x - y) for x, y in zip(got, target, strict=True))
        logger.debug("mp_approximation lambda=%g distance=%.6g", lam, distance)
        distances.append(distance)
    return ConvergenceReport.from_distances(lam_grid, distances)


def mora_check(
    variance: RationalVarianceFunction,
    lam_grid: Sequence[float],
    order: int | None = None,
) -> ConvergenceReport:
    """Cumulant distance from u -> V(m0 + u/sqrt(lam)) to the constant V(m0)."""
    _check_grid(lam_grid)
    limit = cumulants_from_variance(RationalVarianceFunction.constant(variance.anchor_value), order)
    distances = []
    for lam in lam_grid:
        got = cumulants_from_variance(variance.zoomed(1.0 / math.sqrt(lam)), limit.order)
        distances.append(
            max(abs(x - y) for x, y in zip(got.values, limit.values, strict=True))
        )
    return ConvergenceReport.from_distances(lam_grid, distances)
