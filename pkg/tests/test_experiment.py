import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from tailband import (
    EstimateRecord,
    ScenarioConfig,
    ks_statistic,
    ks_two_sample,
    normal_cdf,
    oracle_gap,
    parse_distribution,
    run_scenario,
    summarize,
)
from tailband.experiment import summarize_values

PARETO = parse_distribution("pareto", [0.5])


def small_cfg(**kw):
    base = dict(distribution=PARETO, J=4, m=200, d=10, replications=6, master_seed=99)
    base.update(kw)
    return ScenarioConfig(**base)


def test_config_defaults():
    cfg = small_cfg()
    assert cfg.N == 800 and cfg.k == 40
    assert len(cfg.xgrid) == 50 and cfg.xgrid[0] == 1.0 and cfg.xgrid[-1] == pytest.approx(10.0)
    assert len(cfg.sgrid) == 50 and cfg.sgrid[0] > 0.02 and cfg.sgrid[-1] == 1.0
    assert cfg.truth("hill") == 0.5
    q = small_cfg(estimators=("weissman_quantile",), quantile_p=1e-4).truth("weissman_quantile")
    assert q == pytest.approx(100.0, rel=1e-14)


@pytest.mark.parametrize("kw,key", [
    (dict(J=0), "n_machines"),
    (dict(d=200), "d_exceedances"),
    (dict(replications=0), "replications"),
    (dict(quantile_p=0.5), "quantile_p"),
    (dict(estimators=("weissman_quantile",)), "quantile_p"),
    (dict(estimators=("pickands",), d=50), "d_exceedances"),
    (dict(xgrid=(0.5, 2.0)), "xgrid"),
    (dict(sgrid=(0.5, 1.5)), "sgrid"),
])
def test_config_invariants(kw, key):
    with pytest.raises(ValueError, match=key):
        small_cfg(**kw)


def test_record_cardinality_and_determinism():
    cfg = small_cfg(replications=2)
    a = run_scenario(cfg).records
    assert len(a) == 4
    assert [(r.rep, r.mode) for r in a] == [(0, "distributed"), (0, "oracle"),
                                            (1, "distributed"), (1, "oracle")]
    assert run_scenario(cfg).records == a


def test_workers_do_not_change_records():
    cfg = small_cfg(replications=9, estimators=("hill", "moment", "pickands"))
    base = run_scenario(cfg, workers=1, curves=True)
    for w in (4, 8):
        assert run_scenario(cfg, workers=w, curves=True) == base


def test_reduction_scenario():
    cfg = small_cfg(J=1, m=500, d=40, estimators=("hill", "moment", "pickands", "pwm_gpd",
                                                  "weissman_quantile"), quantile_p=1e-3)
    res = run_scenario(cfg, curves=True)
    pairs = {}
    for r in res.records:
        pairs.setdefault((r.rep, r.estimator), {})[r.mode] = r.value
    assert all(v["distributed"] == v["oracle"] for v in pairs.values())
    for g in oracle_gap(res.records).values():
        assert g.ks_two_sample == 0 and g.diff_mean == 0 and g.diff_sd == 0
    curves = {}
    for c in res.curves:
        curves.setdefault((c.rep, c.process, c.grid_point), {})[c.mode] = c.value
    assert all(v["distributed"] == v["oracle"] for v in curves.values())


def test_same_pooled_data():
    # pooled sample is the concatenation of the machine samples
    cfg = small_cfg(J=3, m=100, d=30, replications=1, master_seed=5)
    from tailband import RngStream, SortedSample, hill, sample
    x = np.concatenate([sample(PARETO, 100, RngStream(5, j)) for j in range(3)])
    rec = run_scenario(cfg).records
    assert rec[1].value == hill(SortedSample.from_values(x), 90)


def test_failures_recorded():
    degenerate = parse_distribution("frechet", [1e17])  # every draw rounds to 1.0
    cfg = ScenarioConfig(degenerate, 2, 20, 3, 3, 1, estimators=("hill", "moment"))
    recs = run_scenario(cfg).records
    assert len(recs) == 12
    failed = [r for r in recs if r.failed]
    assert {r.estimator for r in failed} == {"moment"} and len(failed) == 6
    assert all(math.isnan(r.value) and r.reason for r in failed)
    assert failed[0].reason.startswith("machine 0")
    summ = summarize([r for r in recs if r.estimator == "hill"], 1e-17)
    assert summ[("hill", "oracle")].failures == 0
    with pytest.raises(ValueError):
        summarize(recs, 1e-17)
    with pytest.raises(ValueError):
        oracle_gap([r for r in recs if r.estimator == "moment"])


# --- summaries ---

def test_summary_constant():
    s = summarize_values([0.7] * 5, 0.5)
    assert s.bias == pytest.approx(0.2) and s.sd == 0 and s.rmse == pytest.approx(0.2)


def test_summary_hand_values():
    s = summarize_values([0.4, 0.6], 0.5)
    assert s.mean == pytest.approx(0.5) and s.bias == pytest.approx(0, abs=1e-15)
    assert s.sd == pytest.approx(0.1, rel=1e-12) and s.rmse == pytest.approx(0.1, rel=1e-12)


def test_rmse_identity(rng):
    for _ in range(200):
        v = rng.normal(rng.uniform(-2, 2), rng.uniform(0.01, 3), int(rng.integers(1, 300)))
        s = summarize_values(v, rng.uniform(0.1, 2))
        assert abs(s.rmse**2 - s.bias**2 - s.variance) <= 1e-12


def test_summary_standardization():
    # scale * (v - t) / t for v = t * (1 + z / scale) recovers z
    z = stats.norm.ppf((np.arange(1, 201) - 0.5) / 200)
    s = summarize_values(0.5 * (1 + z / 10), 0.5, scale=10)
    assert s.ks_normal == pytest.approx(0.5 / 200, abs=1e-9)


def test_summarize_groups():
    recs = [EstimateRecord(0, "hill", "distributed", 0.4), EstimateRecord(1, "hill", "distributed", 0.6),
            EstimateRecord(0, "hill", "oracle", 0.5),
            EstimateRecord(1, "hill", "oracle", math.nan, True, "x")]
    out = summarize(recs, {"hill": 0.5})
    assert out[("hill", "distributed")].sd == pytest.approx(0.1)
    assert out[("hill", "oracle")].failures == 1 and out[("hill", "oracle")].count == 1


# --- Kolmogorov-Smirnov ---

def test_ks_examples():
    assert ks_statistic([0.5], lambda x: x) == 0.5
    n = 37
    assert ks_statistic((np.arange(1, n + 1) - 0.5) / n, lambda x: x) == pytest.approx(0.5 / n, abs=1e-15)
    with pytest.raises(ValueError):
        ks_statistic([], lambda x: x)


def test_ks_matches_scipy(rng):
    for _ in range(30):
        v = rng.normal(size=int(rng.integers(1, 200)))
        assert ks_statistic(v, normal_cdf) == pytest.approx(stats.kstest(v, "norm").statistic, abs=1e-12)


def test_ks_two_sample(rng):
    assert ks_two_sample([0.0], [1.0]) == 1.0
    assert ks_two_sample([1, 2, 3], [3, 2, 1]) == 0.0
    with pytest.raises(ValueError):
        ks_two_sample([], [1.0])
    for _ in range(30):
        a = rng.normal(size=int(rng.integers(1, 80)))
        b = rng.normal(0.3, size=int(rng.integers(1, 80)))
        assert ks_two_sample(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-12)


def test_normal_cdf_accuracy():
    mpmath.mp.dps = 40
    for x in np.arange(-3.0, 3.25, 0.25):
        assert abs(normal_cdf(x) - float(mpmath.ncdf(x))) < 1e-7
    np.testing.assert_allclose(normal_cdf(np.array([-1.0, 0.0])), [0.15865525393145707, 0.5])


def test_oracle_gap_examples():
    recs = [EstimateRecord(0, "hill", "distributed", 0.0), EstimateRecord(0, "hill", "oracle", 1.0)]
    g = oracle_gap(recs)["hill"]
    assert g.ks_two_sample == 1.0 and g.diff_mean == -1.0 and g.pairs == 1
    same = [EstimateRecord(r, "hill", m, r * 0.1) for r in range(5) for m in ("distributed", "oracle")]
    g = oracle_gap(same)["hill"]
    assert (g.ks_two_sample, g.diff_mean, g.diff_sd) == (0.0, 0.0, 0.0)
