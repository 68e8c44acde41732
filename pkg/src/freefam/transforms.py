"""Cauchy-Stieltjes, K- and R-transforms and the theta <-> mean <-> z maps."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import CONFIG
from .cumulants import CumulantSequence, RationalVarianceFunction, cumulants_from_variance
from .measures import FloatArray, Measure, kernel_mass
from .moments import MomentSequence, moments_from_cumulants
from .series import TruncatedSeries, mul, reciprocal, series_revert

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransformBundle:
    """R, K and the tail of G at infinity, all as truncated series.

    g_tail is a series in w = 1/z: g_tail[k] is the coefficient of z^(-k),
    so g_tail[0] = 0, g_tail[1] = 1 and g_tail[n + 1] = m_n. K(z) is
    k_pole/z + k_regular(z).
    """

    r_series: TruncatedSeries
    g_tail: TruncatedSeries
    k_pole: float
    k_regular: TruncatedSeries

    def moments(self) -> MomentSequence:
        return MomentSequence(tuple(self.g_tail.coeffs[2:]))


def bundle_from_cumulants(c: CumulantSequence) -> TransformBundle:
    """Build R and K from c, and G by reverting K in the variable w = 1/z.

    With g = G(z), K(g) = z reads w = g / (1 + g R(g)); reverting that
    map at order N + 1 yields m_0..m_N.
    """
    n = c.order
    r = c.r_series()
    r_padded = r.resized(n + 1)
    g = TruncatedSeries.identity(n + 1)
    denominator = TruncatedSeries.constant(1.0, n + 1) + mul(g, r_padded)
    w_of_g = mul(g, reciprocal(denominator))
    g_tail = series_revert(w_of_g)
    return TransformBundle(r_series=r, g_tail=g_tail, k_pole=1.0, k_regular=r)


def _check_outside(measure: Measure, z: float) -> None:
    support = measure.ac_support
    if support is not None and support[0] <= z <= support[1]:
        raise ValueError("evaluation inside support")
    if any(z == a.location for a in measure.atoms):
        raise ValueError("evaluation inside support")


def g_numeric(measure: Measure, z: float) -> float:
    """G(z) = integral of 1/(z - x), for real z off the support."""
    _check_outside(measure, z)
    return measure.integrate(lambda x: 1.0 / (z - x))


@dataclass(frozen=True)
class ThetaPoint:
    theta: float
    M: float
    mean: float
    var: float


def theta_maps(measure: Measure, theta: float) -> ThetaPoint:
    """M(theta), mean and variance of the kernel family member P_theta.

    theta must satisfy |theta| <= theta_window / rho, rho the support
    radius; theta = 0 uses the continuous extension (1, m0, V(m0)).
    """
    m0 = measure.mean()
    if theta == 0:
        return ThetaPoint(0.0, 1.0, m0, measure.variance())
    rho = measure.support_radius
    if rho > 0 and abs(theta) > CONFIG.theta_window / rho:
        raise ValueError("theta outside admissible window")
    mass = kernel_mass(measure, theta)
    # (M - 1)/(theta M), evaluated without the cancellation in M - 1
    mean = measure.integrate(lambda x: x / (1.0 - theta * x)) / mass
    var = (mean - m0) * (1.0 / theta - mean)
    return ThetaPoint(theta, mass, mean, var)


@dataclass(frozen=True)
class MeanParameters:
    """theta = psi(m), z = 1/theta and the value G must take at z."""

    theta: float
    z: float
    g_target: float


def mean_to_theta(variance: RationalVarianceFunction, m: float) -> MeanParameters:
    """psi(m) = (m - m0) / (m (m - m0) + V(m)) and the matching z and G(z)."""
    vm = variance(m)
    if vm <= 0:
        raise ValueError("variance function is not positive at this mean")
    d = m - variance.m0
    if d == 0:
        return MeanParameters(0.0, math.inf, 0.0)
    denominator = m * d + vm
    if denominator == 0:
        raise ValueError("psi undefined at this mean")
    theta = d / denominator
    return MeanParameters(theta, m + vm / d, d / vm)


def member_moments(
    variance: RationalVarianceFunction,
    m: float,
    order: int,
    generator: MomentSequence | None = None,
) -> MomentSequence:
    """Moments 1..order of the family member Q_m, exactly from the generator's moments.

    With z = m + V(m)/(m - m0), Q_m(dx) = (V(m)/(m - m0)) nu(dx)/(z - x) and
    G_nu(z) = (m - m0)/V(m), so
    m_k(Q_m) = z^k - (V(m)/(m - m0)) sum_(i<k) z^(k-1-i) m_i(nu).
    """
    if generator is None:
        generator = moments_from_cumulants(cumulants_from_variance(variance, max(order, 2)), order)
    if generator.order < order:
        raise ValueError("insufficient moments")
    vm = variance(m)
    if vm <= 0:
        raise ValueError("mean outside family domain")
    d = m - variance.m0
    if d == 0:
        return MomentSequence(generator.values[:order])
    z = m + vm / d
    base = np.array(generator.with_zeroth()[:order], dtype=np.float64)
    values: list[float] = []
    for k in range(1, order + 1):
        powers: FloatArray = z ** np.arange(k - 1, -1, -1, dtype=np.float64)
        values.append(float(z**k - (vm / d) * np.dot(powers, base[:k])))
    logger.debug("Member moments at m=%g (z=%g): %s", m, z, values)
    return MomentSequence(tuple(values))
