"""Truncated formal power series arithmetic.

Every transform in freefam is built on `TruncatedSeries`: a coefficient
vector c[0..N] of a power series in one variable, truncated at degree N.
All operations return exact truncations of the formal result, so a
coefficient c[k] only ever depends on input coefficients of index <= k.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


class SeriesOp(str, Enum):
    """Arithmetic operations dispatched by `series_arith`."""

    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    RECIPROCAL = "reciprocal"
    POW = "pow"


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Power series c[0] + c[1]x + ... + c[N]x^N with read-only coefficients."""

    coeffs: FloatArray

    def __post_init__(self) -> None:
        arr = np.array(self.coeffs, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise ValueError("series needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_coeffs(cls, values: Iterable[float], order: int | None = None) -> "TruncatedSeries":
        """Build a series, padding with zeros or truncating to `order` when given."""
        arr = np.asarray(list(values), dtype=np.float64)
        if order is None:
            return cls(arr)
        if order < 0:
            raise ValueError("order must be non-negative")
        out = np.zeros(order + 1)
        n = min(arr.size, order + 1)
        out[:n] = arr[:n]
        return cls(out)

    @classmethod
    def zeros(cls, order: int) -> "TruncatedSeries":
        return cls.from_coeffs([], order)

    @classmethod
    def constant(cls, value: float, order: int) -> "TruncatedSeries":
        return cls.from_coeffs([value], order)

    @classmethod
    def identity(cls, order: int) -> "TruncatedSeries":
        """The series x (just 0 when order is 0)."""
        return cls.from_coeffs([0.0, 1.0], order)

    @property
    def order(self) -> int:
        return int(self.coeffs.size - 1)

    def __getitem__(self, k: int) -> float:
        return float(self.coeffs[k])

    def __len__(self) -> int:
        return int(self.coeffs.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash(self.coeffs.tobytes())

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.to_list()!r})"

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return sub(self, other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return mul(self, other)

    def __neg__(self) -> "TruncatedSeries":
        return scale(self, -1.0)

    def to_list(self) -> list[float]:
        return [float(v) for v in self.coeffs]

    def resized(self, order: int) -> "TruncatedSeries":
        """Same series truncated or zero-padded to a new order."""
        return TruncatedSeries.from_coeffs(self.coeffs, order)

    def shifted_down(self) -> "TruncatedSeries":
        """f(x)/x for a series with f(0) = 0, at order N-1 (order 0 stays order 0)."""
        if self.coeffs[0] != 0.0:
            raise ValueError("series must vanish at origin to divide by x")
        return TruncatedSeries.from_coeffs(self.coeffs[1:], max(self.order - 1, 0))

    def shifted_up(self) -> "TruncatedSeries":
        """x*f(x) at order N+1."""
        return TruncatedSeries(np.concatenate(([0.0], self.coeffs)))


def _check_orders(a: TruncatedSeries, b: TruncatedSeries) -> None:
    if a.order != b.order:
        raise ValueError(f"series orders differ: {a.order} != {b.order}")


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_orders(a, b)
    return TruncatedSeries(a.coeffs + b.coeffs)


def sub(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_orders(a, b)
    return TruncatedSeries(a.coeffs - b.coeffs)


def scale(a: TruncatedSeries, factor: float) -> TruncatedSeries:
    return TruncatedSeries(a.coeffs * factor)


def _product_coeff(a: FloatArray, b: FloatArray, k: int) -> float:
    # exactly rounded, so [x^k] never depends on how far the operands extend
    return math.fsum(a[: k + 1] * b[k::-1])


def _truncated_product(a: FloatArray, b: FloatArray) -> FloatArray:
    return np.array([_product_coeff(a, b, k) for k in range(a.size)])


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_orders(a, b)
    return TruncatedSeries(_truncated_product(a.coeffs, b.coeffs))


def reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    """1/a(x), solved coefficient by coefficient."""
    a0 = a.coeffs[0]
    if a0 == 0.0:
        raise ValueError("non-invertible series")
    n = a.order
    out = np.zeros(n + 1)
    out[0] = 1.0 / a0
    for k in range(1, n + 1):
        out[k] = -math.fsum(a.coeffs[1 : k + 1] * out[k - 1 :: -1][:k]) / a0
    return TruncatedSeries(out)


def power(a: TruncatedSeries, exponent: int) -> TruncatedSeries:
    """a(x)**exponent by binary exponentiation."""
    if exponent < 0:
        raise ValueError("pow requires a non-negative exponent")
    result = TruncatedSeries.constant(1.0, a.order)
    base = a
    e = exponent
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def derivative(a: TruncatedSeries) -> TruncatedSeries:
    """d/dx at the same order; the top coefficient is unknown and set to 0."""
    n = a.order
    out = np.zeros(n + 1)
    out[:n] = a.coeffs[1:] * np.arange(1, n + 1)
    return TruncatedSeries(out)


def evaluate(a: TruncatedSeries, x: float) -> float:
    """Evaluate the truncated polynomial at x."""
    return float(np.polynomial.polynomial.polyval(x, a.coeffs))


def series_arith(
    op: SeriesOp,
    a: TruncatedSeries,
    b: TruncatedSeries | None = None,
    exponent: int | None = None,
) -> TruncatedSeries:
    """Dispatch one of the `SeriesOp` operations."""
    if op is SeriesOp.RECIPROCAL:
        return reciprocal(a)
    if op is SeriesOp.POW:
        if exponent is None:
            raise ValueError("pow requires an exponent")
        return power(a, exponent)
    if b is None:
        raise ValueError(f"{op.value} requires a second operand")
    if op is SeriesOp.ADD:
        return add(a, b)
    if op is SeriesOp.SUB:
        return sub(a, b)
    return mul(a, b)


def series_compose(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """f(g(x)) truncated to degree N, by Horner's scheme."""
    _check_orders(f, g)
    if g.coeffs[0] != 0.0:
        raise ValueError("inner series must vanish at origin")
    n = f.order
    acc = np.zeros(n + 1)
    acc[0] = f.coeffs[n]
    for k in range(n - 1, -1, -1):
        acc = _truncated_product(acc, g.coeffs)
        acc[0] += f.coeffs[k]
    return TruncatedSeries(acc)


def _check_revertible(f: TruncatedSeries) -> None:
    if f.coeffs[0] != 0.0:
        raise ValueError("inner series must vanish at origin")
    if f.order < 1 or f.coeffs[1] == 0.0:
        raise ValueError("non-invertible at origin")


def series_revert(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse g with f(g(x)) = g(f(x)) = x to order N.

    Newton iteration g <- g - (f(g) - x) / f'(g); each step doubles the
    number of correct coefficients, starting from the linear term.
    """
    _check_revertible(f)
    n = f.order
    x = TruncatedSeries.identity(n)
    g = scale(x, 1.0 / f[1])
    df = derivative(f)
    correct = 1
    while correct < n:
        residual = sub(series_compose(f, g), x)
        g = sub(g, mul(residual, reciprocal(series_compose(df, g))))
        correct *= 2
        logger.debug("Newton reversion: %d of %d coefficients settled", min(correct, n), n)
    return g


def series_revert_lagrange(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse from the Lagrange coefficient formula.

    g_n = (1/n) [x^(n-1)] (x/f(x))^n. Quadratic in N times the cost of a
    product; kept as an independent check on `series_revert`.
    """
    _check_revertible(f)
    n = f.order
    phi = reciprocal(f.shifted_down().resized(n))
    out = np.zeros(n + 1)
    term = TruncatedSeries.constant(1.0, n)
    for k in range(1, n + 1):
        term = mul(term, phi)
        out[k] = term[k - 1] / k
    return TruncatedSeries(out)
