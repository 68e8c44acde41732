"""Variance functions, free cumulants and the admissibility report."""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from numpy.polynomial import Polynomial

from .config import CONFIG
from .series import TruncatedSeries, mul, reciprocal, series_revert

logger = logging.getLogger(__name__)


def _as_coeffs(values: Iterable[float]) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not out:
        raise ValueError("polynomial needs at least one coefficient")
    if not all(math.isfinite(v) for v in out):
        raise ValueError("polynomial coefficients must be finite")
    return out


def _degree(coeffs: Sequence[float]) -> int:
    return max((k for k, v in enumerate(coeffs) if v != 0.0), default=0)


def _taylor(
    num: Sequence[float], den: Sequence[float], center: float, order: int
) -> TruncatedSeries:
    """Taylor series of P/Q about `center`, as a series in (m - center)."""
    shift = Polynomial([center, 1.0])
    p = Polynomial(num)(shift).coef
    q = Polynomial(den)(shift).coef
    q_series = TruncatedSeries.from_coeffs(q, order)
    if q_series[0] == 0.0:
        raise ValueError(f"variance function has a pole at m={center:g}")
    return mul(TruncatedSeries.from_coeffs(p, order), reciprocal(q_series))


@dataclass(frozen=True)
class RationalVarianceFunction:
    """V(m) = P(m)/Q(m) with anchor mean m0; coefficients in increasing degree."""

    num: tuple[float, ...]
    den: tuple[float, ...] = (1.0,)
    m0: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "num", _as_coeffs(self.num))
        object.__setattr__(self, "den", _as_coeffs(self.den))
        object.__setattr__(self, "m0", float(self.m0))
        max_degree = CONFIG.max_degree
        if _degree(self.num) > max_degree or _degree(self.den) > max_degree:
            raise ValueError(f"variance function degree exceeds {max_degree}")
        q = float(np.polynomial.polynomial.polyval(self.m0, self.den))
        if q == 0.0:
            raise ValueError("degenerate or invalid variance at anchor")
        if not float(np.polynomial.polynomial.polyval(self.m0, self.num)) / q > 0.0:
            raise ValueError("degenerate or invalid variance at anchor")

    @classmethod
    def constant(cls, value: float, m0: float = 0.0) -> "RationalVarianceFunction":
        return cls(num=(value,), m0=m0)

    @classmethod
    def quadratic(cls, a: float, b: float, m0: float = 0.0) -> "RationalVarianceFunction":
        """1 + a*m + b*m**2, the free Meixner variance functions."""
        return cls(num=(1.0, a, b), m0=m0)

    def __call__(self, m: float) -> float:
        q = float(np.polynomial.polynomial.polyval(m, self.den))
        if q == 0.0:
            raise ValueError(f"variance function has a pole at m={m:g}")
        return float(np.polynomial.polynomial.polyval(m, self.num)) / q

    @property
    def anchor_value(self) -> float:
        """V(m0)."""
        return self(self.m0)

    def taylor(self, order: int, center: float | None = None) -> TruncatedSeries:
        """Coefficients of V(center + x), center defaulting to m0."""
        return _taylor(self.num, self.den, self.m0 if center is None else center, order)

    def derivative(self, m: float | None = None, k: int = 1) -> float:
        """k-th derivative of V at m (default m0)."""
        return math.factorial(k) * self.taylor(k, center=m)[k]

    def scaled(self, lam: float) -> "RationalVarianceFunction":
        """V/lam, same anchor."""
        if lam <= 0:
            raise ValueError("scale must be positive")
        return RationalVarianceFunction(tuple(p / lam for p in self.num), self.den, self.m0)

    def dilated(self, a: float) -> "RationalVarianceFunction":
        """V(a*m)/a**2 anchored at m0/a: the variance function of the law of X/a."""
        if a == 0:
            raise ValueError("dilation factor must be nonzero")
        num = tuple(p * a**k / a**2 for k, p in enumerate(self.num))
        den = tuple(q * a**k for k, q in enumerate(self.den))
        return RationalVarianceFunction(num, den, self.m0 / a)

    def zoomed(self, s: float) -> "RationalVarianceFunction":
        """u -> V(m0 + s*u), anchored at 0."""
        if s == 0:
            raise ValueError("zoom factor must be nonzero")
        shift = Polynomial([self.m0, s])
        num = tuple(Polynomial(self.num)(shift).coef)
        den = tuple(Polynomial(self.den)(shift).coef)
        return RationalVarianceFunction(num, den, 0.0)

    def to_json(self) -> dict[str, Any]:
        return {"num": list(self.num), "den": list(self.den), "m0": self.m0}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "RationalVarianceFunction":
        return cls(
            num=tuple(data["num"]),
            den=tuple(data.get("den", (1.0,))),
            m0=data.get("m0", 0.0),
        )


@dataclass(frozen=True)
class CumulantSequence:
    """Free cumulants c_1..c_N.

    `formal` marks sequences produced by operations that have no
    measure-level meaning in general (free convolution powers below 1).
    """

    values: tuple[float, ...]
    formal: bool = False

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("cumulant sequence is empty")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("cumulants must be finite")
        object.__setattr__(self, "values", values)

    @property
    def order(self) -> int:
        return len(self.values)

    def cumulant(self, k: int) -> float:
        """c_k, 1-indexed."""
        if not 1 <= k <= self.order:
            raise IndexError(f"cumulant index {k} outside 1..{self.order}")
        return self.values[k - 1]

    def truncated(self, order: int) -> "CumulantSequence":
        if order > self.order:
            raise ValueError("order exceeds available cumulants")
        return CumulantSequence(self.values[:order], self.formal)

    def centered(self) -> "CumulantSequence":
        """Same sequence with c_1 = 0 (translation to mean zero)."""
        return CumulantSequence((0.0, *self.values[1:]), self.formal)

    def r_series(self) -> TruncatedSeries:
        """R(z) = sum c_n z^(n-1), at order N-1."""
        return TruncatedSeries.from_coeffs(self.values)

    def to_list(self) -> list[float]:
        return list(self.values)


class CumulantAction(str, Enum):
    DILATE = "dilate"
    POWER = "power"
    CONVOLVE = "convolve"


def cumulants_from_variance(
    variance: RationalVarianceFunction, order: int | None = None
) -> CumulantSequence:
    """Free cumulants of the generating measure of the family (V, m0).

    c_1 = m0 and c_(n+1) = (1/n) [x^(n-1)] V(m0 + x)^n.
    """
    n_max = CONFIG.order if order is None else order
    if n_max < 2:
        raise ValueError("order must be at least 2")
    if variance.anchor_value <= 0:
        raise ValueError("degenerate or invalid variance at anchor")
    taylor = variance.taylor(n_max - 2)
    values = [variance.m0]
    term = TruncatedSeries.constant(1.0, taylor.order)
    for n in range(1, n_max):
        term = mul(term, taylor)
        values.append(term[n - 1] / n)
    return CumulantSequence(tuple(values))


def variance_from_cumulants(c: CumulantSequence, order: int | None = None) -> TruncatedSeries:
    """Taylor series of V about m0 = c_1 recovered from cumulants.

    With h(u) = R(u) - m0 and x = m - m0, the family satisfies x = h(u) for
    u = x/V, so V = x / h^(-1)(x). N cumulants determine V to order N-2.
    """
    if c.order < 2 or c.values[1] <= 0:
        raise ValueError("degenerate measure has no variance function")
    available = c.order - 2
    n = available if order is None else order
    if n > available:
        raise ValueError(f"order {n} needs {n + 2} cumulants, got {c.order}")
    h = TruncatedSeries.from_coeffs((0.0, *c.values[1:]), n + 1)
    inverse = series_revert(h)
    return reciprocal(inverse.shifted_down())


def transform_cumulants(
    c: CumulantSequence,
    action: CumulantAction,
    *,
    r: float | None = None,
    lam: float | None = None,
    other: CumulantSequence | None = None,
) -> CumulantSequence:
    """Apply a dilation, a dilated free convolution power, or a free convolution."""
    if action is CumulantAction.DILATE:
        if not r:
            raise ValueError("dilation factor must be nonzero")
        return CumulantSequence(
            tuple(v / r**k for k, v in enumerate(c.values, start=1)), c.formal
        )
    if action is CumulantAction.POWER:
        if lam is None or lam <= 0:
            raise ValueError("power must be positive")
        formal = c.formal or lam < 1
        if lam < 1:
            logger.warning("Free convolution power %g < 1 is formal", lam)
        values = (c.values[0], *(v / lam**k for k, v in enumerate(c.values[1:], start=1)))
        return CumulantSequence(values, formal)
    if other is None:
        raise ValueError("convolve requires a second cumulant sequence")
    if other.order != c.order:
        raise ValueError(f"cumulant orders differ: {c.order} != {other.order}")
    return CumulantSequence(
        tuple(x + y for x, y in zip(c.values, other.values, strict=True)),
        c.formal or other.formal,
    )


def standardize_variance(variance: RationalVarianceFunction) -> RationalVarianceFunction:
    """V*(u) = V(m0 + u*sqrt(V(m0))) / V(m0), anchored at 0 with V*(0) = 1."""
    v0 = variance.anchor_value
    return variance.zoomed(math.sqrt(v0)).scaled(v0)


class CheckName(str, Enum):
    Z_MAP = "z_map"
    SECOND_DERIVATIVE = "second_derivative"
    HANKEL = "hankel"
    LEVY_KHINCHIN = "levy_khinchin"
    FREE_ID_SECOND_DERIVATIVE = "free_id_second_derivative"


class CheckScope(str, Enum):
    """Whether a failure rejects V itself or only a freely infinitely divisible generator."""

    ADMISSIBILITY = "admissibility"
    INFINITE_DIVISIBILITY = "infinite_divisibility"


@dataclass(frozen=True)
class AdmissibilityCheck:
    name: CheckName
    scope: CheckScope
    passed: bool
    witness: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name.value,
            "scope": self.scope.value,
            "passed": self.passed,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class AdmissibilityReport:
    variance: RationalVarianceFunction
    standardized: RationalVarianceFunction
    order: int
    checks: tuple[AdmissibilityCheck, ...]

    @property
    def overall(self) -> bool:
        """True only if every admissibility-scoped check passed."""
        return all(c.passed for c in self.checks if c.scope is CheckScope.ADMISSIBILITY)

    @property
    def infinitely_divisible(self) -> bool:
        return all(
            c.passed for c in self.checks if c.scope is CheckScope.INFINITE_DIVISIBILITY
        )

    def check(self, name: CheckName) -> AdmissibilityCheck:
        for c in self.checks:
            if c.name is name:
                return c
        raise KeyError(name)

    def failed(self) -> list[CheckName]:
        return [c.name for c in self.checks if not c.passed]

    def to_json(self) -> dict[str, Any]:
        return {
            "variance": self.variance.to_json(),
            "standardized": self.standardized.to_json(),
            "order": self.order,
            "overall": self.overall,
            "infinitely_divisible": self.infinitely_divisible,
            "checks": [c.to_json() for c in self.checks],
        }


def _z_map_check(
    standardized: RationalVarianceFunction, window: float, samples: int
) -> AdmissibilityCheck:
    # z(u) = u + V*(u)/u must decrease on both sides of the anchor
    offsets = np.geomspace(window * 1e-4, window, samples, endpoint=False)
    u = np.concatenate((-offsets[::-1], offsets))
    p = Polynomial(standardized.num)
    q = Polynomial(standardized.den)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = p(u) / q(u)
        dv = (p.deriv()(u) * q(u) - p(u) * q.deriv()(u)) / q(u) ** 2
        slope = 1.0 + (dv * u - v) / u**2
    finite = np.isfinite(slope)
    idx = int(np.argmax(np.where(finite, slope, np.inf)))
    passed = bool(np.all(finite) and np.all(slope < 0))
    return AdmissibilityCheck(
        CheckName.Z_MAP,
        CheckScope.ADMISSIBILITY,
        passed,
        {
            "window": window,
            "samples": samples,
            "max_slope": float(slope[idx]) if finite[idx] else None,
            "at": float(u[idx]),
        },
    )


def admissibility_report(
    variance: RationalVarianceFunction,
    order: int = 8,
    window: float | None = None,
    samples: int | None = None,
    tol: float | None = None,
) -> AdmissibilityReport:
    """Run the necessary conditions for V to be a free exponential family variance.

    All checks run on the standardized V*; none short-circuits. Failures of
    the infinite-divisibility checks do not affect `overall`.
    """
    from .moments import hankel_check, hankel_psd, moments_from_cumulants

    if order < 4:
        raise ValueError("admissibility order must be at least 4")
    tol = CONFIG.hankel_tol if tol is None else tol
    samples = CONFIG.z_samples if samples is None else samples
    vs = standardize_variance(variance)
    window = CONFIG.z_window * math.sqrt(vs.anchor_value) if window is None else window

    checks = [_z_map_check(vs, window, samples)]

    taylor = vs.taylor(2)
    second = 2.0 * taylor[2]
    checks.append(
        AdmissibilityCheck(
            CheckName.SECOND_DERIVATIVE,
            CheckScope.ADMISSIBILITY,
            second >= -2.0 - CONFIG.tol,
            {"second_derivative": second, "bound": -2.0},
        )
    )

    cumulants = cumulants_from_variance(vs, 2 * order)
    moments = moments_from_cumulants(cumulants, 2 * order - 2)
    hankel = hankel_psd(moments, order, tol=tol)
    checks.append(
        AdmissibilityCheck(
            CheckName.HANKEL,
            CheckScope.ADMISSIBILITY,
            hankel.passed,
            {"determinants": list(hankel.determinants)},
        )
    )

    levy = hankel_check(cumulants.values[1:], order, tol=tol)
    checks.append(
        AdmissibilityCheck(
            CheckName.LEVY_KHINCHIN,
            CheckScope.INFINITE_DIVISIBILITY,
            levy.passed,
            {"determinants": list(levy.determinants)},
        )
    )

    # Cauchy-Schwarz on the shifted sequence: c2*c4 >= c3**2, i.e. V*''(0) >= 0
    c2, c3, c4 = cumulants.values[1:4]
    checks.append(
        AdmissibilityCheck(
            CheckName.FREE_ID_SECOND_DERIVATIVE,
            CheckScope.INFINITE_DIVISIBILITY,
            second >= -CONFIG.tol,
            {"second_derivative": second, "c2_c4": c2 * c4, "c3_squared": c3 * c3},
        )
    )

    report = AdmissibilityReport(variance, vs, order, tuple(checks))
    logger.debug(
        "Admissibility overall=%s id=%s failed=%s",
        report.overall,
        report.infinitely_divisible,
        [n.value for n in report.failed()],
    )
    return report
