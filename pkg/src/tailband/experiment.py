"""Monte Carlo engine comparing distributed and oracle (pooled) estimators."""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple

import numpy as np

from .distributed import (
    DcConfig,
    distributed_point_estimate,
    distributed_tail_empirical_process,
    distributed_tail_quantile_process,
    partition,
)
from .distributions import DistributionSpec, RngStream, sample, upper_quantile
from .estimators import EstimatorError, EstimatorKind, estimate
from .tailproc import SortedSample, tail_empirical_process, tail_quantile_process

MODES = ("distributed", "oracle")


def default_xgrid() -> tuple[float, ...]:
    return tuple(np.geomspace(1.0, 10.0, 50))


def default_sgrid() -> tuple[float, ...]:
    # 50 points on (0.02, 1]
    return tuple(np.linspace(0.02, 1.0, 51)[1:])


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario: ``J`` machines with ``m`` observations each.

    The oracle estimator runs on the pooled ``N = J*m`` observations with
    ``k = J*d`` exceedances. Validation messages name the config-file keys.
    """

    distribution: DistributionSpec
    J: int
    m: int
    d: int
    replications: int
    master_seed: int
    estimators: tuple[EstimatorKind, ...] = (EstimatorKind.HILL,)
    quantile_p: float | None = None
    xgrid: tuple[float, ...] = field(default_factory=default_xgrid)
    sgrid: tuple[float, ...] = field(default_factory=default_sgrid)
    output_dir: str = "./out"

    def __post_init__(self):
        if self.J < 1:
            raise ValueError("n_machines must be at least 1")
        if self.m < 2:
            raise ValueError("m_per_machine must be at least 2")
        if not 1 <= self.d < self.m:
            raise ValueError("d_exceedances must satisfy 1 <= d < m_per_machine")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        kinds = tuple(EstimatorKind(e) for e in self.estimators)
        if not kinds:
            raise ValueError("estimators must name at least one estimator")
        object.__setattr__(self, "estimators", kinds)
        if EstimatorKind.PICKANDS in kinds and 4 * self.d >= self.m:
            raise ValueError("d_exceedances: pickands needs 4*d < m_per_machine")
        if EstimatorKind.PWM_GPD in kinds and self.d < 2:
            raise ValueError("d_exceedances: pwm_gpd needs d >= 2")
        if self.quantile_p is not None and not 0 < self.quantile_p < self.d / self.m:
            raise ValueError(
                f"quantile_p must lie in (0, d/m) = (0, {self.d / self.m:g})"
            )
        if EstimatorKind.WEISSMAN_QUANTILE in kinds and self.quantile_p is None:
            raise ValueError("quantile_p is required by weissman_quantile")
        xg, sg = np.asarray(self.xgrid, float), np.asarray(self.sgrid, float)
        if xg.size < 1 or np.any(np.diff(xg) <= 0) or np.any(xg < 1):
            raise ValueError("xgrid must be strictly increasing with points >= 1")
        if sg.size < 1 or np.any(np.diff(sg) <= 0) or np.any((sg <= 0) | (sg > 1)):
            raise ValueError("sgrid must be strictly increasing within (0, 1]")
        object.__setattr__(self, "xgrid", tuple(float(v) for v in xg))
        object.__setattr__(self, "sgrid", tuple(float(v) for v in sg))

    @property
    def N(self) -> int:
        return self.J * self.m

    @property
    def k(self) -> int:
        return self.J * self.d

    def truth(self, kind) -> float:
        """True gamma for index estimators, true ``1 - p`` quantile otherwise."""
        if EstimatorKind(kind).is_tail_index:
            return self.distribution.true_gamma
        return upper_quantile(self.distribution, self.quantile_p)


@dataclass(frozen=True)
class EstimateRecord:
    rep: int
    estimator: str
    mode: str
    value: float
    failed: bool = False
    reason: str = ""


class CurveRecord(NamedTuple):
    rep: int
    process: str
    mode: str
    grid_point: float
    value: float


class ScenarioResult(NamedTuple):
    records: list[EstimateRecord]
    curves: list[CurveRecord]


def replicate(cfg: ScenarioConfig, rep: int, curves: bool = False) -> ScenarioResult:
    """Generate one pooled sample and evaluate every estimator in both modes."""
    machines = [
        sample(cfg.distribution, cfg.m, RngStream.for_machine(cfg.master_seed, rep, j, cfg.J))
        for j in range(cfg.J)
    ]
    pooled = np.concatenate(machines)
    data = partition(pooled, cfg.J)
    oracle = SortedSample.from_values(pooled)
    dc = DcConfig(cfg.d)

    records = []
    for kind in cfg.estimators:
        runs = (
            ("distributed", lambda: distributed_point_estimate(data, dc, kind, cfg.quantile_p)),
            ("oracle", lambda: estimate(kind, oracle, cfg.k, cfg.quantile_p)),
        )
        for mode, fn in runs:
            try:
                records.append(EstimateRecord(rep, kind.value, mode, float(fn())))
            except EstimatorError as exc:
                records.append(EstimateRecord(rep, kind.value, mode, math.nan, True, str(exc)))

    curve_rows = []
    if curves:
        procs = (
            ("tail_empirical", cfg.xgrid,
             lambda g: distributed_tail_empirical_process(data, dc, g),
             lambda g: tail_empirical_process(oracle, cfg.k, g)),
            ("tail_quantile", cfg.sgrid,
             lambda g: distributed_tail_quantile_process(data, dc, g),
             lambda g: tail_quantile_process(oracle, cfg.k, g)),
        )
        for name, grid, dist_fn, oracle_fn in procs:
            for mode, fn in zip(MODES, (dist_fn, oracle_fn)):
                try:
                    curve = fn(grid)
                except EstimatorError:
                    # non-positive threshold; the estimate records carry the reason
                    continue
                curve_rows.extend(
                    CurveRecord(rep, name, mode, float(g), float(v))
                    for g, v in zip(curve.grid, curve.values)
                )
    return ScenarioResult(records, curve_rows)


def _replicate_block(cfg, reps, curves):
    out_r, out_c = [], []
    for rep in reps:
        r, c = replicate(cfg, rep, curves)
        out_r.extend(r)
        out_c.extend(c)
    return out_r, out_c


def run_scenario(cfg: ScenarioConfig, workers: int = 1, curves: bool = False) -> ScenarioResult:
    """Run all replications, optionally across worker processes.

    Each (replication, machine) pair has its own random stream, so the
    result is identical for any ``workers`` value.
    """
    reps = range(cfg.replications)
    workers = max(1, min(int(workers), cfg.replications))
    if workers == 1:
        records, curve_rows = _replicate_block(cfg, reps, curves)
    else:
        blocks = [list(b) for b in np.array_split(np.arange(cfg.replications), workers * 4) if b.size]
        records, curve_rows = [], []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for r, c in pool.map(_replicate_block, [cfg] * len(blocks), blocks, [curves] * len(blocks)):
                records.extend(r)
                curve_rows.extend(c)
    records.sort(key=lambda r: r.rep)
    curve_rows.sort(key=lambda c: c.rep)
    return ScenarioResult(records, curve_rows)


# --- summaries -------------------------------------------------------------

_erfc = np.frompyfunc(math.erfc, 1, 1)


def normal_cdf(x):
    """Standard normal cdf via ``erfc`` (accurate in both tails)."""
    arr = np.asarray(x, dtype=float)
    out = 0.5 * np.asarray(_erfc(-arr / math.sqrt(2.0)), dtype=float)
    if out.ndim == 0:
        return float(out)
    return out


def ks_statistic(values, cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov distance to a continuous cdf."""
    x = np.sort(np.asarray(values, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValueError("ks_statistic needs at least one value")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov distance ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("ks_two_sample needs two non-empty samples")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


@dataclass(frozen=True)
class SummaryStats:
    estimator: str
    mode: str
    count: int
    mean: float
    bias: float
    sd: float
    rmse: float
    ks_normal: float
    failures: int

    @property
    def variance(self) -> float:
        return self.sd * self.sd


def summarize_values(values, truth: float, scale: float = 1.0, *,
                     estimator: str = "", mode: str = "", failures: int = 0) -> SummaryStats:
    """Bias, population sd, rmse and standardized normal KS distance.

    Standardization is ``scale * (value - truth) / truth``; with
    ``scale = sqrt(J*d)`` this is the Hill normalization.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError(f"no successful replications for {estimator or 'group'} {mode}".rstrip())
    mean = float(np.mean(v))
    var = float(np.mean((v - mean) ** 2))
    rmse = math.sqrt(float(np.mean((v - truth) ** 2)))
    z = scale * (v - truth) / truth
    return SummaryStats(estimator, mode, int(v.size), mean, mean - truth, math.sqrt(var),
                        rmse, ks_statistic(z, normal_cdf), failures)


def _groups(records):
    groups = defaultdict(list)
    for r in records:
        groups[(r.estimator, r.mode)].append(r)
    return groups


def summarize(records, truth: float | Mapping[str, float], scale: float = 1.0
              ) -> dict[tuple[str, str], SummaryStats]:
    """Summaries per ``(estimator, mode)``; failed records are only counted.

    ``truth`` is a number or a mapping from estimator name to its true value.
    """
    out = {}
    for (est, mode), recs in _groups(records).items():
        t = truth[est] if isinstance(truth, Mapping) else truth
        ok = [r.value for r in recs if not r.failed]
        out[(est, mode)] = summarize_values(ok, t, scale, estimator=est, mode=mode,
                                            failures=len(recs) - len(ok))
    return out


@dataclass(frozen=True)
class OracleGap:
    estimator: str
    pairs: int
    ks_two_sample: float
    diff_mean: float
    diff_sd: float


def oracle_gap(records) -> dict[str, OracleGap]:
    """Compare distributed against oracle replicate values per estimator."""
    by_est = defaultdict(lambda: defaultdict(dict))
    for r in records:
        if not r.failed:
            by_est[r.estimator][r.rep][r.mode] = r.value
    ests = dict.fromkeys(r.estimator for r in records)
    out = {}
    for est in ests:
        pairs = [(v["distributed"], v["oracle"]) for _, v in sorted(by_est[est].items())
                 if len(v) == 2]
        if not pairs:
            raise ValueError(f"no complete distributed/oracle pairs for {est}")
        dist, orc = np.array(pairs).T
        diff = dist - orc
        out[est] = OracleGap(est, len(pairs), ks_two_sample(dist, orc),
                             float(np.mean(diff)), float(np.std(diff)))
    return out
