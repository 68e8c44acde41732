"""Compactly supported measures: free Meixner laws, semicircle and Marchenko-Pastur members.

A `Measure` is an absolutely continuous part of the form

    density(x) = sqrt(R**2 - (x - c)**2) * weight(x)   on |x - c| < R

plus finitely many atoms. Integrals use the substitution x = c + R sin(t),
which turns the square-root endpoints into a smooth integrand for
composite Gauss-Legendre quadrature.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.special import roots_legendre

from .config import CONFIG
from .cumulants import RationalVarianceFunction

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
WeightFn = Callable[[FloatArray], FloatArray]

# Atoms lighter than this are roundoff from clamped or cancelling formulas.
ATOM_CUTOFF = 1e-14


@lru_cache(maxsize=32)
def _composite_rule(nodes: int, panel: int) -> tuple[FloatArray, FloatArray]:
    """Composite Gauss-Legendre nodes and weights on (-pi/2, pi/2)."""
    panels = max(1, nodes // panel)
    x, w = roots_legendre(panel)
    edges = np.linspace(-math.pi / 2, math.pi / 2, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    logger.debug("Quadrature rule: %d panels x %d nodes", panels, panel)
    return t, wt


def _product(base: WeightFn, factor: Callable[[FloatArray], FloatArray]) -> WeightFn:
    return lambda x: base(x) * factor(x)


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float

    def to_json(self) -> dict[str, float]:
        return {"location": self.location, "mass": self.mass}


@dataclass(frozen=True)
class Measure:
    """Square-root-edged AC part on [center - radius, center + radius] plus atoms.

    `radius == 0` or `weight is None` means there is no AC part.
    """

    center: float
    radius: float
    weight: WeightFn | None
    atoms: tuple[Atom, ...] = ()
    description: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)
    nodes: int | None = None

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("support radius must be non-negative")
        if any(a.mass < 0 for a in self.atoms):
            raise ValueError("atom masses must be non-negative")

    @property
    def has_ac_part(self) -> bool:
        return self.weight is not None and self.radius > 0

    @property
    def ac_support(self) -> tuple[float, float] | None:
        if not self.has_ac_part:
            return None
        return (self.center - self.radius, self.center + self.radius)

    @property
    def support_points(self) -> list[float]:
        """AC endpoints and atom locations: the extreme points of the support hull."""
        points = [a.location for a in self.atoms]
        if self.ac_support is not None:
            points.extend(self.ac_support)
        return points

    @property
    def support_radius(self) -> float:
        """max |x| over the support."""
        return max((abs(x) for x in self.support_points), default=0.0)

    def ac_density(self, x: FloatArray | float) -> FloatArray:
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.zeros_like(xs)
        if not self.has_ac_part or self.weight is None:
            return out
        inside = np.abs(xs - self.center) < self.radius
        if np.any(inside):
            xi = xs[inside]
            out[inside] = np.sqrt(self.radius**2 - (xi - self.center) ** 2) * self.weight(xi)
        return out

    def integrate(self, f: Callable[[FloatArray], FloatArray]) -> float:
        """Integral of f against the whole measure (AC part and atoms)."""
        total = 0.0
        if self.has_ac_part and self.weight is not None:
            t, w = _composite_rule(self.nodes or CONFIG.quad_nodes, CONFIG.quad_panel)
            x = self.center + self.radius * np.sin(t)
            jac = (self.radius * np.cos(t)) ** 2
            total += float(np.sum(w * f(x) * self.weight(x) * jac))
        if self.atoms:
            loc = np.array([a.location for a in self.atoms])
            mass = np.array([a.mass for a in self.atoms])
            total += float(np.sum(mass * f(loc)))
        return total

    def moment(self, k: int) -> float:
        return self.integrate(lambda x: x**k)

    def total_mass(self) -> float:
        return self.integrate(np.ones_like)

    def mean(self) -> float:
        return self.moment(1)

    def variance(self) -> float:
        mu = self.mean()
        return self.integrate(lambda x: (x - mu) ** 2)

    def reweighted(
        self,
        factor: Callable[[FloatArray], FloatArray],
        description: str,
        **metadata: Any,
    ) -> "Measure":
        """Multiply the measure by a positive function of x."""
        atoms = tuple(
            Atom(a.location, float(a.mass * factor(np.array([a.location]))[0]))
            for a in self.atoms
        )
        return replace(
            self,
            weight=None if self.weight is None else _product(self.weight, factor),
            atoms=atoms,
            description=description,
            metadata={**self.metadata, **metadata},
        )

    def with_nodes(self, nodes: int) -> "Measure":
        return replace(self, nodes=nodes)


class MeixnerType(str, Enum):
    """The six affine types of free Meixner laws, by (a, b) of V = 1 + a*m + b*m**2."""

    SEMICIRCLE = "semicircle"
    FREE_POISSON = "free_poisson"
    FREE_PASCAL = "free_pascal"
    FREE_GAMMA = "free_gamma"
    FREE_HYPERBOLIC = "free_hyperbolic"
    FREE_BINOMIAL = "free_binomial"


@dataclass(frozen=True)
class MeixnerParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.b < -1:
            raise ValueError("outside Meixner admissibility")

    @property
    def law_type(self) -> MeixnerType:
        a, b = self.a, self.b
        if b == 0:
            return MeixnerType.SEMICIRCLE if a == 0 else MeixnerType.FREE_POISSON
        if b < 0:
            return MeixnerType.FREE_BINOMIAL
        disc = a * a - 4 * b
        if disc > 0:
            return MeixnerType.FREE_PASCAL
        if disc == 0:
            return MeixnerType.FREE_GAMMA
        return MeixnerType.FREE_HYPERBOLIC

    def variance_function(self) -> RationalVarianceFunction:
        return RationalVarianceFunction.quadratic(self.a, self.b)


def _meixner_atoms(p: MeixnerParams) -> tuple[list[Atom], list[dict[str, float]]]:
    """Atoms of the free Meixner law and any clamped (negative) candidate masses."""
    a, b = p.a, p.b
    candidates: list[tuple[float, float]] = []
    if b == 0:
        if a * a > 1:
            candidates.append((-1.0 / a, 1.0 - 1.0 / (a * a)))
    elif b > 0:
        if a * a > 4 * b:
            d = math.sqrt(a * a - 4 * b)
            x1 = -math.copysign(abs(a) - d, a) / (2 * b)
            candidates.append((x1, 1.0 - (abs(a) - d) / (2 * b * d)))
    else:
        d = math.sqrt(a * a - 4 * b)
        candidates.append(((-a + d) / (2 * b), 1.0 + (d - a) / (2 * b * d)))
        candidates.append(((-a - d) / (2 * b), 1.0 + (d + a) / (2 * b * d)))

    atoms: list[Atom] = []
    clamped: list[dict[str, float]] = []
    for location, mass in candidates:
        if mass < -ATOM_CUTOFF:
            clamped.append({"location": location, "mass": mass})
            logger.warning("Clamped negative atom mass %.3g at %.6g", mass, location)
        if mass > ATOM_CUTOFF:
            atoms.append(Atom(location, mass))
    return atoms, clamped


def meixner_measure(p: MeixnerParams, nodes: int | None = None) -> Measure:
    """The free Meixner law generating the family with V(m) = 1 + a*m + b*m**2, m0 = 0."""
    a, b = p.a, p.b
    atoms, clamped = _meixner_atoms(p)
    radius = 2.0 * math.sqrt(1.0 + b)

    def weight(x: FloatArray) -> FloatArray:
        return 1.0 / (2.0 * math.pi * (1.0 + a * x + b * x * x))

    measure = Measure(
        center=a,
        radius=radius,
        weight=weight if radius > 0 else None,
        atoms=tuple(atoms),
        description=f"free Meixner a={a:g} b={b:g}",
        metadata={"a": a, "b": b, "type": p.law_type.value, "clamped_atoms": clamped},
        nodes=nodes,
    )
    mass = measure.total_mass()
    if abs(mass - 1.0) > 1e-8:
        logger.warning("Free Meixner a=%g b=%g has total mass %.12g", a, b, mass)
    return replace(measure, metadata={**measure.metadata, "total_mass": mass})


def meixner_g_closed(p: MeixnerParams, z: float) -> float:
    """Closed-form Cauchy transform of the free Meixner law at real z outside the support."""
    a, b = p.a, p.b
    w = z - a
    width2 = 4.0 * (1.0 + b)
    if w * w <= width2 and width2 > 0:
        raise ValueError("evaluation inside support")
    denom = 1.0 + a * z + b * z * z
    if denom == 0.0:
        raise ValueError("evaluation at an atom or pole")
    # branch with G(z) ~ 1/z at infinity
    root = w * math.sqrt(1.0 - width2 / (w * w)) if w != 0 else 0.0
    return (a + z + 2 * b * z - root) / (2.0 * denom)


def semicircle_measure(mean: float = 0.0, sd: float = 1.0, nodes: int | None = None) -> Measure:
    """Wigner semicircle law with the given mean and standard deviation."""
    if sd <= 0:
        raise ValueError("standard deviation must be positive")
    scale = 1.0 / (2.0 * math.pi * sd * sd)

    def weight(x: FloatArray) -> FloatArray:
        return np.full_like(x, scale)

    return Measure(
        center=mean,
        radius=2.0 * sd,
        weight=weight,
        description=f"semicircle mean={mean:g} sd={sd:g}",
        metadata={"mean": mean, "sd": sd},
        nodes=nodes,
    )


def mp_member(m: float, lam: float, nodes: int | None = None) -> Measure:
    """Member with mean m of the family V = 1/lam generated by the semicircle of sd 1/sqrt(lam)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if m * m * lam > 1.0 + 1e-12:
        raise ValueError("mean outside family domain")

    def weight(x: FloatArray) -> FloatArray:
        return lam / (2.0 * math.pi * (1.0 + lam * m * (m - x)))

    return Measure(
        center=0.0,
        radius=2.0 / math.sqrt(lam),
        weight=weight,
        description=f"Marchenko-Pastur member m={m:g} lambda={lam:g}",
        metadata={"m": m, "lambda": lam},
        nodes=nodes,
    )


def kernel_mass(nu: Measure, theta: float) -> float:
    """M(theta) = integral of 1/(1 - theta*x); requires theta*x < 1 on the support."""
    if any(theta * x >= 1.0 for x in nu.support_points):
        raise ValueError("kernel positivity violated")
    return nu.integrate(lambda x: 1.0 / (1.0 - theta * x))


def kernel_reweight(nu: Measure, theta: float) -> Measure:
    """The kernel family member P_theta(dx) = nu(dx) / (M(theta) (1 - theta*x))."""
    if theta == 0:
        return nu
    mass = kernel_mass(nu, theta)
    return nu.reweighted(
        lambda x: 1.0 / (mass * (1.0 - theta * x)),
        f"{nu.description} | theta={theta:g}",
        theta=theta,
    )


def family_member(nu: Measure, variance: RationalVarianceFunction, m: float) -> Measure:
    """Q_m(dx) = V(m) / (V(m) + (m - m0)(m - x)) nu(dx), the member with mean m."""
    m0 = variance.m0
    try:
        vm = variance(m)
    except ValueError as e:
        raise ValueError("mean outside family domain") from e
    if vm <= 0:
        raise ValueError("mean outside family domain")
    if m == m0:
        return nu
    d = m - m0
    ac = nu.ac_support
    # the weight denominator is linear in x: checking the hull endpoints suffices
    if ac is not None and any(vm + d * (m - x) < 0 for x in ac):
        raise ValueError("mean outside family domain")
    if any(vm + d * (m - a.location) <= 0 for a in nu.atoms):
        raise ValueError("mean outside family domain")
    return nu.reweighted(
        lambda x: vm / (vm + d * (m - x)), f"{nu.description} | mean={m:g}", mean=m
    )


def measure_moment(nu: Measure, k: int) -> float:
    if k < 0:
        raise ValueError("moment order must be non-negative")
    if k > CONFIG.max_moment:
        raise ValueError(f"moment order exceeds configured maximum {CONFIG.max_moment}")
    return nu.moment(k)


def density_table(nu: Measure, points: int | None = None) -> list[tuple[float, float]]:
    """(x, density) rows across the AC support; empty for purely atomic measures."""
    support = nu.ac_support
    if support is None:
        return []
    xs = np.linspace(support[0], support[1], points or CONFIG.density_points)
    return [(float(x), float(y)) for x, y in zip(xs, nu.ac_density(xs), strict=True)]


def atoms_payload(nu: Measure) -> list[dict[str, float]]:
    return [a.to_json() for a in sorted(nu.atoms, key=lambda a: a.location)]
