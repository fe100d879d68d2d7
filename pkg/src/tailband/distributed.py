"""Divide-and-conquer versions of the tail processes and estimators.

Every machine computes its statistic from its own top ``d`` order
statistics; the results are averaged. Averages use ``math.fsum`` (correctly
rounded) so the output does not depend on machine order, and a single
machine reproduces the pooled-sample computation bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .estimators import (
    EstimatorError,
    EstimatorKind,
    _check_p,
    estimate,
    extrapolation_factor,
)
from .tailproc import (
    ProcessCurve,
    SortedSample,
    check_k,
    exceedance_fraction,
    quantile_ratios,
)

QUANTILE_AGGREGATES = ("mean", "logmean")


@dataclass(frozen=True, eq=False)
class ShardedData:
    shards: tuple[SortedSample, ...]

    def __post_init__(self):
        shards = tuple(self.shards)
        if not shards:
            raise ValueError("need at least one shard")
        if len({s.n for s in shards}) != 1:
            raise ValueError("all shards must have the same size")
        object.__setattr__(self, "shards", shards)

    @property
    def J(self) -> int:
        return len(self.shards)

    @property
    def m(self) -> int:
        return self.shards[0].n

    @property
    def N(self) -> int:
        return self.J * self.m


@dataclass(frozen=True)
class DcConfig:
    """Per-machine exceedance count ``d`` and aggregation switches.

    ``quantile_aggregate="logmean"`` averages log-ratios of the tail quantile
    process (geometric mean) instead of the ratios themselves.
    """

    d: int
    aggregator: str = "arithmetic_mean"
    quantile_aggregate: str = "mean"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.aggregator != "arithmetic_mean":
            raise ValueError(f"unsupported aggregator {self.aggregator!r}")
        if self.quantile_aggregate not in QUANTILE_AGGREGATES:
            raise ValueError(f"quantile_aggregate must be one of {QUANTILE_AGGREGATES}")

    def validate(self, m: int, kind=None) -> None:
        check_k(self.d, m)
        if kind is not None and EstimatorKind(kind) is EstimatorKind.PICKANDS and 4 * self.d >= m:
            raise ValueError(f"pickands needs 4d < m, got d={self.d}, m={m}")


def partition(pooled, J: int) -> ShardedData:
    """Split into ``J`` contiguous blocks (original order), each then sorted."""
    x = np.asarray(pooled, dtype=float)
    if J < 1:
        raise ValueError("number of machines J must be at least 1")
    if x.ndim != 1 or x.size == 0 or x.size % J:
        raise ValueError(f"J={J} must divide the pooled sample size {x.size}")
    return ShardedData(tuple(SortedSample.from_values(b) for b in np.split(x, J)))


def machine_mean(values: Sequence[float]) -> float:
    if len(values) == 1:
        return float(values[0])
    mean = math.fsum(values) / len(values)
    # rounding may push the mean of near-equal values past the extremes
    return min(max(mean, min(values)), max(values))


def _column_mean(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 1:
        return rows[0].copy()
    mean = np.array([math.fsum(col) for col in rows.T]) / rows.shape[0]
    return np.clip(mean, rows.min(axis=0), rows.max(axis=0))


def _machine_thresholds(data: ShardedData, d: int) -> np.ndarray:
    thr = np.array([s.values[s.n - d - 1] for s in data.shards])
    bad = np.flatnonzero(~(thr > 0))
    if bad.size:
        raise EstimatorError(f"machine {bad[0]}: threshold {thr[bad[0]]} must be positive")
    return thr


def machine_estimates(data: ShardedData, cfg: DcConfig, kind) -> list[float]:
    """Per-machine tail-index estimates; the first failing machine aborts."""
    cfg.validate(data.m, kind)
    out = []
    for j, shard in enumerate(data.shards):
        try:
            out.append(estimate(kind, shard, cfg.d))
        except EstimatorError as exc:
            raise EstimatorError(f"machine {j}: {exc}") from exc
    return out


def distributed_point_estimate(data: ShardedData, cfg: DcConfig, kind, p: float | None = None) -> float:
    """Average of machine estimators, each with ``k = d``.

    For ``weissman_quantile`` the distributed Hill estimate feeds
    :func:`distributed_weissman` at exceedance probability ``p``.
    """
    kind = EstimatorKind(kind)
    if kind is EstimatorKind.WEISSMAN_QUANTILE:
        if p is None:
            raise ValueError("weissman_quantile needs an exceedance probability p")
        gamma_dc = distributed_point_estimate(data, cfg, EstimatorKind.HILL)
        return distributed_weissman(data, cfg, p, gamma_dc)
    return machine_mean(machine_estimates(data, cfg, kind))


def machine_tail_empirical_curves(data: ShardedData, cfg: DcConfig, xgrid) -> np.ndarray:
    """Shape ``(J, len(xgrid))``: each machine's curve with its own threshold."""
    cfg.validate(data.m)
    xgrid = np.atleast_1d(np.asarray(xgrid, dtype=float))
    if np.any(xgrid < 1):
        raise ValueError("tail empirical process grid points must be >= 1")
    thr = _machine_thresholds(data, cfg.d)
    return np.array([
        exceedance_fraction(s.values, u, cfg.d, xgrid) for s, u in zip(data.shards, thr)
    ])


def distributed_tail_empirical_process(data: ShardedData, cfg: DcConfig, xgrid) -> ProcessCurve:
    xgrid = np.atleast_1d(np.asarray(xgrid, dtype=float))
    curves = machine_tail_empirical_curves(data, cfg, xgrid)
    return ProcessCurve(xgrid, _column_mean(curves))


def machine_tail_quantile_curves(data: ShardedData, cfg: DcConfig, sgrid) -> np.ndarray:
    cfg.validate(data.m)
    sgrid = np.atleast_1d(np.asarray(sgrid, dtype=float))
    if np.any((sgrid <= 0) | (sgrid > 1)):
        raise ValueError("tail quantile process grid points must lie in (0, 1]")
    _machine_thresholds(data, cfg.d)
    return np.array([quantile_ratios(s.values, cfg.d, sgrid) for s in data.shards])


def distributed_tail_quantile_process(data: ShardedData, cfg: DcConfig, sgrid) -> ProcessCurve:
    sgrid = np.atleast_1d(np.asarray(sgrid, dtype=float))
    curves = machine_tail_quantile_curves(data, cfg, sgrid)
    if cfg.quantile_aggregate == "logmean" and data.J > 1:
        values = np.exp(_column_mean(np.log(curves)))
    else:
        values = _column_mean(curves)
    return ProcessCurve(sgrid, values)


def distributed_weissman(data: ShardedData, cfg: DcConfig, p: float, gamma_dc: float) -> float:
    """Geometric mean of machine thresholds extrapolated by ``(d/(m p))**gamma_dc``."""
    cfg.validate(data.m)
    _check_p(p, cfg.d, data.m, strict=True)
    thr = _machine_thresholds(data, cfg.d)
    if data.J == 1:
        base = float(thr[0])
    else:
        base = math.exp(math.fsum(np.log(thr)) / data.J)
    return base * extrapolation_factor(cfg.d, data.m, p, gamma_dc)

