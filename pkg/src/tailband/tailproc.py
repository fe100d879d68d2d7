"""Order statistics, threshold excesses and the tail empirical/quantile processes.

Order statistics use the 1-based convention ``X_{1,n} <= ... <= X_{n,n}``;
the intermediate order statistic ``X_{n-k,n}`` is the random threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True, eq=False)
class SortedSample:
    """Ascending observations. Use :meth:`from_values` for unsorted input."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("sample must be a non-empty 1-d array")
        if np.any(v[1:] < v[:-1]):
            raise ValueError("sample values must be ascending")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values) -> "SortedSample":
        return cls(np.sort(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        return self.values.size

    def order_stat(self, i: int) -> float:
        """``X_{i,n}`` for ``1 <= i <= n``."""
        if not 1 <= i <= self.n:
            raise IndexError(f"order statistic index {i} outside 1..{self.n}")
        return float(self.values[i - 1])

    def threshold(self, k: int) -> float:
        """The intermediate order statistic ``X_{n-k,n}``."""
        check_k(k, self.n)
        return float(self.values[self.n - k - 1])


@dataclass(frozen=True, eq=False)
class ProcessCurve:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.shape != v.shape or g.ndim != 1:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)


class EstimatorError(ValueError):
    """Degenerate data for the requested statistic (not a usage error)."""


class Excesses(NamedTuple):
    raw: np.ndarray
    log: np.ndarray | None


def check_k(k: int, n: int) -> None:
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")


def _as_grid(grid) -> np.ndarray:
    g = np.atleast_1d(np.asarray(grid, dtype=float))
    if g.ndim != 1:
        raise ValueError("grid must be 1-d")
    return g


def exceedance_fraction(values: np.ndarray, u: float, k: int, xgrid: np.ndarray) -> np.ndarray:
    """``#{X_i > u * x} / k`` for each ``x``; ``values`` must be ascending."""
    counts = values.size - np.searchsorted(values, u * xgrid, side="right")
    return counts / k


def tail_empirical_process(sample: SortedSample, k: int, xgrid) -> ProcessCurve:
    """Scaled exceedance counts above multiples of the threshold ``X_{n-k,n}``."""
    check_k(k, sample.n)
    xgrid = _as_grid(xgrid)
    if np.any(xgrid < 1):
        raise ValueError("tail empirical process grid points must be >= 1")
    u = sample.threshold(k)
    return ProcessCurve(xgrid, exceedance_fraction(sample.values, u, k, xgrid))


def quantile_ratios(values: np.ndarray, k: int, sgrid: np.ndarray) -> np.ndarray:
    n = values.size
    u = values[n - k - 1]
    if not u > 0:
        raise EstimatorError(f"threshold X_(n-k,n) = {u} must be positive")
    j = np.floor(k * sgrid).astype(np.int64)
    return values[n - j - 1] / u


def tail_quantile_process(sample: SortedSample, k: int, sgrid) -> ProcessCurve:
    """Ratios ``X_{n-floor(ks),n} / X_{n-k,n}`` for ``s`` in ``(0, 1]``."""
    check_k(k, sample.n)
    sgrid = _as_grid(sgrid)
    if np.any((sgrid <= 0) | (sgrid > 1)):
        raise ValueError("tail quantile process grid points must lie in (0, 1]")
    return ProcessCurve(sgrid, quantile_ratios(sample.values, k, sgrid))


def threshold_excesses(sample: SortedSample, k: int, log: bool = True) -> Excesses:
    """Ascending excesses of the top ``k`` order statistics over ``X_{n-k,n}``.

    Log excesses are computed as ``log(X_i / X_{n-k,n})``; pass ``log=False``
    to skip them (and the positivity requirement) when only raw excesses matter.
    """
    check_k(k, sample.n)
    v = sample.values
    u = v[sample.n - k - 1]
    top = v[sample.n - k:]
    raw = top - u
    logs = None
    if log:
        if not u > 0:
            raise EstimatorError(f"threshold X_(n-k,n) = {u} must be positive for log excesses")
        logs = np.log(top / u)
    return Excesses(raw, logs)
