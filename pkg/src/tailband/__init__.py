"""Divide-and-conquer extreme value inference with Monte Carlo oracle checks."""

__version__ = "0.1.0"

from .distributions import (
    DistributionSpec,
    RngStream,
    cdf,
    parse_distribution,
    quantile,
    upper_quantile,
    sample,
)
from .tailproc import (
    ProcessCurve,
    SortedSample,
    tail_empirical_process,
    tail_quantile_process,
    threshold_excesses,
)
from .estimators import (
    EstimatorError,
    EstimatorKind,
    estimate,
    hill,
    moment,
    pickands,
    pwm_gpd,
    weissman_quantile,
)
from .distributed import (
    DcConfig,
    ShardedData,
    distributed_point_estimate,
    distributed_tail_empirical_process,
    distributed_tail_quantile_process,
    distributed_weissman,
    partition,
)
from .experiment import (
    CurveRecord,
    EstimateRecord,
    OracleGap,
    ScenarioConfig,
    SummaryStats,
    ks_statistic,
    ks_two_sample,
    normal_cdf,
    oracle_gap,
    run_scenario,
    summarize,
)
