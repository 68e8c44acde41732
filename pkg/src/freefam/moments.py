"""Moment-cumulant transforms, non-crossing partitions and Hankel checks."""

import itertools
import logging
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import CONFIG
from .cumulants import CumulantSequence
from .series import TruncatedSeries, mul

logger = logging.getLogger(__name__)

Blocks = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class MomentSequence:
    """Moments m_1..m_N; m_0 = 1 is implicit."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("moments must be finite")
        object.__setattr__(self, "values", values)

    @property
    def order(self) -> int:
        return len(self.values)

    def moment(self, k: int) -> float:
        if k == 0:
            return 1.0
        if not 1 <= k <= self.order:
            raise IndexError(f"moment index {k} outside 0..{self.order}")
        return self.values[k - 1]

    def with_zeroth(self) -> list[float]:
        return [1.0, *self.values]

    def to_list(self) -> list[float]:
        return list(self.values)


def _is_non_crossing(blocks: Blocks) -> bool:
    for first, second in itertools.combinations(blocks, 2):
        for a, c in itertools.combinations(first, 2):
            # blocks interleave iff `second` has points both strictly inside and outside (a, c)
            inside = any(a < x < c for x in second)
            outside = any(x < a or x > c for x in second)
            if inside and outside:
                return False
    return True


@dataclass(frozen=True)
class NonCrossingPartition:
    """A partition of {1..n} into blocks, no two of which interleave."""

    blocks: Blocks

    @classmethod
    def from_blocks(
        cls, blocks: Sequence[Sequence[int]], n: int | None = None
    ) -> "NonCrossingPartition":
        """Validate and normalize blocks into a partition of {1..n}."""
        normalized = tuple(sorted(tuple(sorted(b)) for b in blocks if b))
        points = sorted(itertools.chain.from_iterable(normalized))
        size = len(points) if n is None else n
        if points != list(range(1, size + 1)):
            raise ValueError(f"blocks do not partition {{1..{size}}}")
        if not _is_non_crossing(normalized):
            raise ValueError("blocks cross")
        return cls(normalized)

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(b) for b in self.blocks))


@lru_cache(maxsize=None)
def _nc_interval(lo: int, hi: int) -> tuple[Blocks, ...]:
    """Non-crossing partitions of the integer interval [lo, hi]."""
    if lo > hi:
        return ((),)
    out: list[Blocks] = []
    rest = range(lo + 1, hi + 1)
    for k in range(len(rest) + 1):
        for tail in itertools.combinations(rest, k):
            # the block holding `lo` splits the rest into independent gaps
            block = (lo, *tail)
            bounds = (*block, hi + 1)
            gaps = [_nc_interval(bounds[i] + 1, bounds[i + 1] - 1) for i in range(len(block))]
            for parts in itertools.product(*gaps):
                out.append((block, *itertools.chain.from_iterable(parts)))
    return tuple(out)


def enumerate_nc_partitions(n: int) -> list[NonCrossingPartition]:
    """All non-crossing partitions of {1..n}; test oracle only."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > CONFIG.nc_limit:
        raise ValueError("enumeration bound exceeded")
    return [NonCrossingPartition(tuple(sorted(blocks))) for blocks in _nc_interval(1, n)]


@lru_cache(maxsize=None)
def _size_signatures(n: int) -> Counter[tuple[int, ...]]:
    return Counter(tuple(sorted(len(b) for b in blocks)) for blocks in _nc_interval(1, n))


def moments_via_nc_oracle(c: CumulantSequence, order: int | None = None) -> MomentSequence:
    """m_n as a sum over non-crossing partitions of products of block cumulants."""
    n_max = c.order if order is None else order
    if n_max > c.order:
        raise ValueError("order exceeds available cumulants")
    if n_max > CONFIG.nc_limit:
        raise ValueError("enumeration bound exceeded")
    values = []
    for n in range(1, n_max + 1):
        total = 0.0
        for sizes, count in _size_signatures(n).items():
            total += count * math.prod(c.cumulant(s) for s in sizes)
        values.append(total)
    return MomentSequence(tuple(values))


def power_table(series: TruncatedSeries, count: int) -> list[TruncatedSeries]:
    """[series, series**2, ..., series**count]."""
    out = [series]
    for _ in range(count - 1):
        out.append(mul(out[-1], series))
    return out


def moments_from_cumulants(c: CumulantSequence, order: int | None = None) -> MomentSequence:
    """Moments from free cumulants.

    m_n = sum_(s=1..n) c_s [x^(n-s)] M(x)^s with M(x) = sum m_i x^i, m_0 = 1.
    """
    n_max = c.order if order is None else order
    if n_max > c.order:
        raise ValueError("order exceeds available cumulants")
    m = np.zeros(n_max + 1)
    m[0] = 1.0
    for n in range(1, n_max + 1):
        prefix = TruncatedSeries.from_coeffs(m[:n])
        powers = power_table(prefix, n)
        m[n] = sum(c.values[s - 1] * powers[s - 1][n - s] for s in range(1, n + 1))
    return MomentSequence(tuple(m[1:]))


def cumulants_from_moments(m: MomentSequence, order: int | None = None) -> CumulantSequence:
    """Inverse of `moments_from_cumulants`: c_n = m_n - sum_(s<n) c_s [x^(n-s)] M(x)^s."""
    n_max = m.order if order is None else order
    if n_max > m.order:
        raise ValueError("order exceeds available moments")
    if n_max == 0:
        raise ValueError("at least one moment is required")
    full = TruncatedSeries.from_coeffs(m.with_zeroth()[: n_max + 1])
    powers = power_table(full, n_max)
    c: list[float] = []
    for n in range(1, n_max + 1):
        lower = sum(c[s - 1] * powers[s - 1][n - s] for s in range(1, n))
        c.append(m.values[n - 1] - lower)
    return CumulantSequence(tuple(c))


@dataclass(frozen=True)
class HankelResult:
    determinants: tuple[float, ...]
    passed: bool


def hankel_check(entries: Sequence[float], size: int, tol: float | None = None) -> HankelResult:
    """Leading principal minors of [s_(i+j)], 0 <= i, j < size.

    A k x k minor passes when it is >= -tol * scale**k, scale being the
    largest magnitude among the entries it uses (at least 1).
    """
    tol = CONFIG.hankel_tol if tol is None else tol
    if size < 1:
        raise ValueError("Hankel size must be positive")
    if len(entries) < 2 * size - 1:
        raise ValueError("insufficient moments")
    s = np.asarray(entries[: 2 * size - 1], dtype=np.float64)
    idx = np.add.outer(np.arange(size), np.arange(size))
    matrix = s[idx]
    passed = True
    dets: list[float] = []
    for k in range(1, size + 1):
        det = float(np.linalg.det(matrix[:k, :k]))
        scale = max(1.0, float(np.max(np.abs(s[: 2 * k - 1]))))
        passed = passed and det >= -tol * scale**k
        dets.append(det)
    return HankelResult(tuple(dets), passed)


def hankel_psd(seq: MomentSequence, size: int, tol: float | None = None) -> HankelResult:
    """Hankel positivity of (1, m_1, m_2, ...) up to size x size."""
    return hankel_check(seq.with_zeroth(), size, tol)


def support_bound(c: CumulantSequence) -> float:
    """4*M + |c_1| with M = max_k |c_k|^(1/k): an outer bound on the support radius."""
    if c.order < 2:
        raise ValueError("support bound needs at least two cumulants")
    m = max(abs(v) ** (1.0 / k) for k, v in enumerate(c.values[1:], start=2))
    return 4.0 * m + abs(c.values[0])
