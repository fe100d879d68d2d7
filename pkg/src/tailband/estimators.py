"""Peak-over-threshold estimators on a single sample.

Each estimator uses the top ``k`` order statistics of one sample, which is
either the pooled (oracle) sample or one machine's shard. Degenerate data
raise :class:`EstimatorError` instead of returning a clamped value.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .tailproc import EstimatorError, SortedSample, check_k, threshold_excesses

__all__ = [
    "EstimatorError",
    "EstimatorKind",
    "estimate",
    "extrapolation_factor",
    "hill",
    "moment",
    "pickands",
    "pwm_gpd",
    "pwm_gpd_from_excesses",
    "weissman_quantile",
]

RATIO_TOL = 1e-12


class EstimatorKind(str, enum.Enum):
    HILL = "hill"
    MOMENT = "moment"
    PICKANDS = "pickands"
    PWM_GPD = "pwm_gpd"
    WEISSMAN_QUANTILE = "weissman_quantile"

    @property
    def is_tail_index(self) -> bool:
        return self is not EstimatorKind.WEISSMAN_QUANTILE


def hill(sample: SortedSample, k: int) -> float:
    """Mean log-excess over ``X_{n-k,n}``."""
    return float(np.mean(threshold_excesses(sample, k).log))


def moment(sample: SortedSample, k: int) -> float:
    """Dekkers-Einmahl-de Haan moment estimator; may be negative."""
    logs = threshold_excesses(sample, k).log
    m1 = float(np.mean(logs))
    m2 = float(np.mean(logs * logs))
    if m2 == 0:
        raise EstimatorError("moment estimator: second log-moment is zero")
    ratio = m1 * m1 / m2
    if abs(1.0 - ratio) <= RATIO_TOL:
        raise EstimatorError("moment estimator: M1^2/M2 equals 1")
    return m1 + 1.0 - 0.5 / (1.0 - ratio)


def pickands(sample: SortedSample, k: int) -> float:
    """Pickands estimator from the order statistics at levels n-k, n-2k, n-4k.

    Requires ``4k < n`` so that ``X_{n-4k,n}`` exists.
    """
    n = sample.n
    if k < 1 or 4 * k >= n:
        raise ValueError(f"pickands needs 1 <= k and 4k < n, got k={k}, n={n}")
    x1 = sample.order_stat(n - k)
    x2 = sample.order_stat(n - 2 * k)
    x4 = sample.order_stat(n - 4 * k)
    num, den = x1 - x2, x2 - x4
    if den <= 0 or num <= 0:
        raise EstimatorError("pickands estimator: zero spacing between order statistics")
    return math.log(num / den) / math.log(2.0)


def pwm_gpd_from_excesses(excesses) -> float:
    """GPD shape by probability-weighted moments of ascending excesses."""
    y = np.asarray(excesses, dtype=float)
    k = y.size
    if k < 2:
        raise ValueError("pwm_gpd needs at least 2 excesses")
    w0 = float(np.mean(y))
    weights = (k - np.arange(1, k + 1)) / (k - 1)
    w1 = float(np.mean(y * weights))
    denom = w0 - 2.0 * w1
    if denom <= RATIO_TOL * abs(w0):
        raise EstimatorError("pwm_gpd: w0 - 2*w1 is not positive (shape outside PWM range)")
    return 2.0 - w0 / denom


def pwm_gpd(sample: SortedSample, k: int) -> float:
    if k < 2:
        raise ValueError("pwm_gpd needs k >= 2")
    return pwm_gpd_from_excesses(threshold_excesses(sample, k, log=False).raw)


def extrapolation_factor(k: int, n: int, p: float, gamma_hat: float) -> float:
    return (k / (n * p)) ** gamma_hat


def weissman_quantile(
    sample: SortedSample, k: int, p: float, gamma_hat: float, *, strict: bool = True
) -> float:
    """Extrapolate the threshold ``X_{n-k,n}`` to the ``1 - p`` quantile.

    ``p`` must lie in ``(0, k/n)``; ``strict=False`` also admits ``p = k/n``.
    """
    check_k(k, sample.n)
    _check_p(p, k, sample.n, strict)
    u = sample.threshold(k)
    if not u > 0:
        raise EstimatorError(f"threshold X_(n-k,n) = {u} must be positive")
    return u * extrapolation_factor(k, sample.n, p, gamma_hat)


def _check_p(p, k, n, strict):
    limit = k / n
    if not p > 0 or p > limit or (strict and p == limit):
        raise ValueError(f"exceedance probability p={p} must lie in (0, {limit})")


_INDEX_ESTIMATORS = {
    EstimatorKind.HILL: hill,
    EstimatorKind.MOMENT: moment,
    EstimatorKind.PICKANDS: pickands,
    EstimatorKind.PWM_GPD: pwm_gpd,
}


def estimate(kind, sample: SortedSample, k: int, p: float | None = None) -> float:
    """Dispatch on ``kind``; the quantile estimator is fed by the Hill estimate."""
    kind = EstimatorKind(kind)
    if kind is EstimatorKind.WEISSMAN_QUANTILE:
        if p is None:
            raise ValueError("weissman_quantile needs an exceedance probability p")
        return weissman_quantile(sample, k, p, hill(sample, k))
    return _INDEX_ESTIMATORS[kind](sample, k)
