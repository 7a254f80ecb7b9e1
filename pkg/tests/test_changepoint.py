"""Moving-sum change-point detection: trace oracle, threshold, pruning,
bootstrap intervals."""

import math

import numpy as np
import pytest

from trendlens.changepoint import (
    ChangePointReport,
    MosumConfig,
    _epsilon_prune,
    _local_maxima_above,
    detect,
    mosum_statistic,
    mosum_threshold,
)
from trendlens.series import SlopeSeries


def make_slope(values):
    return SlopeSeries((2006, 2), np.asarray(values, float), "slope")


def oracle_trace(x, g, rule):
    """Per-index two-window recomputation with explicit loops."""
    x = np.asarray(x, float)
    n = len(x)
    out = np.full(n, np.nan)
    for t in range(g, n - g):
        prior = x[t - g:t]
        after = x[t:t + g]
        vp = prior.var(ddof=1)
        va = after.var(ddof=1)
        combined = {"average": 0.5 * (vp + va),
                    "min": min(vp, va),
                    "max": max(vp, va)}[rule]
        numer = abs(after.mean() - prior.mean())
        scale = math.sqrt(combined) * math.sqrt(2.0 / g)
        if scale == 0.0:
            out[t] = 0.0 if numer == 0.0 else np.inf
        else:
            out[t] = numer / scale
    return out


class TestTrace:
    def test_matches_oracle_every_index(self):
        rng = np.random.default_rng(99)
        x = rng.normal(0, 1, 168)
        x[100:] += 2.5
        s = make_slope(x)
        for rule in ("average", "min", "max"):
            trace = mosum_statistic(s, 10, rule)
            ref = oracle_trace(x, 10, rule)
            defined = ~np.isnan(ref)
            assert np.array_equal(np.isnan(trace), np.isnan(ref))
            assert np.max(np.abs(trace[defined] - ref[defined])) <= 1e-10

    def test_undefined_ends(self):
        x = np.random.default_rng(1).normal(0, 1, 60)
        for g in (2, 5, 14):
            trace = mosum_statistic(make_slope(x), g)
            assert np.all(np.isnan(trace[:g]))
            assert np.all(np.isnan(trace[len(x) - g:]))
            assert not np.any(np.isnan(trace[g:len(x) - g]))

    def test_constant_series_zero(self):
        trace = mosum_statistic(make_slope(np.full(50, 3.0)), 5)
        defined = ~np.isnan(trace)
        assert np.all(trace[defined] == 0.0)

    def test_noiseless_step_peaks_at_step(self):
        x = np.zeros(100)
        k = 40
        x[k:] = 7.0
        trace = mosum_statistic(make_slope(x), 10)
        assert np.nanargmax(trace) == k
        assert np.isinf(trace[k])

    def test_location_invariance(self):
        rng = np.random.default_rng(4)
        x = rng.normal(0, 1, 120)
        a = mosum_statistic(make_slope(x), 8)
        b = mosum_statistic(make_slope(x + 57.0), 8)
        defined = ~np.isnan(a)
        assert np.allclose(a[defined], b[defined], atol=1e-9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(4)
        x = rng.normal(0, 1, 120)
        a = mosum_statistic(make_slope(x), 8)
        for k in (3.0, -2.0, 0.001):
            b = mosum_statistic(make_slope(k * x), 8)
            defined = ~np.isnan(a)
            assert np.allclose(a[defined], b[defined], atol=1e-8)

    def test_series_too_short(self):
        with pytest.raises(ValueError):
            mosum_statistic(make_slope(np.zeros(20)), 10)


class TestThreshold:
    def test_frozen_value(self):
        assert mosum_threshold(168, 10, 0.05) == pytest.approx(4.065679114, abs=1e-8)

    def test_matches_rederived_formula(self):
        for n, g, alpha in ((168, 10, 0.05), (168, 5, 0.05), (400, 20, 0.01)):
            ratio = n / g
            a = math.sqrt(2 * math.log(ratio))
            b = (2 * math.log(ratio)
                 + 0.5 * math.log(math.log(max(ratio, math.e)))
                 + math.log(3 / (2 * math.sqrt(math.pi))))
            q = -math.log(math.log(1 / math.sqrt(1 - alpha)))
            assert mosum_threshold(n, g, alpha) == pytest.approx((b + q) / a,
                                                                 rel=1e-12)

    def test_alpha_monotonicity(self):
        assert mosum_threshold(168, 10, 0.01) > mosum_threshold(168, 10, 0.05)

    def test_grows_with_length(self):
        values = [mosum_threshold(n, 10, 0.05) for n in (50, 500, 5000, 50000)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            mosum_threshold(20, 10, 0.05)
        with pytest.raises(ValueError):
            mosum_threshold(168, 10, 0.0)


class TestPruning:
    def test_local_maxima_plateau_first_index(self):
        trace = np.array([np.nan, 1.0, 5.0, 5.0, 1.0, 6.0, 2.0, np.nan])
        assert _local_maxima_above(trace, 3.0) == [2, 5]

    def test_epsilon_requires_wide_exceedance(self):
        trace = np.array([np.nan, 2.0, 2.0, 6.0, 2.0, 2.0, np.nan])
        # spike of width 1: survives only when the window is the point itself
        assert _epsilon_prune(trace, [3], 5.0, 10, 0.1) == [3]
        assert _epsilon_prune(trace, [3], 5.0, 10, 0.5) == []
        wide = np.array([np.nan, 5.5, 5.6, 6.0, 5.7, 5.4, np.nan])
        assert _epsilon_prune(wide, [3], 5.0, 10, 0.5) == [3]

    def test_wide_epsilon_drops_noisy_shift_spike(self):
        # variance inflation near a real shift narrows the exceedance
        # neighborhood; the wide setting then rejects a true detection
        rng = np.random.default_rng(1)
        x = rng.normal(0, 1, 168)
        x[84:] += 3.0
        s = make_slope(x)
        wide = detect(s, MosumConfig(bandwidth=10, epsilon=0.5,
                                     bootstrap_replicates=0))
        slim = detect(s, MosumConfig(bandwidth=10, epsilon=0.1,
                                     bootstrap_replicates=0))
        assert wide.change_points == []
        assert slim.change_points == [84]

    def test_eta_spacing(self):
        x = np.zeros(168)
        x[50:] += 5.0
        x[100:] += 8.0
        s = make_slope(x)
        near = detect(s, MosumConfig(bandwidth=10, eta=2.0,
                                     bootstrap_replicates=0))
        assert near.change_points == [50, 100]
        # both statistics are infinite; ties resolve to the earlier index
        far = detect(s, MosumConfig(bandwidth=10, eta=12.0,
                                    bootstrap_replicates=0))
        assert far.change_points == [50]


class TestDetect:
    def test_noiseless_step(self):
        x = np.zeros(120)
        x[70:] = 4.0
        report = detect(make_slope(x), MosumConfig(bandwidth=10, seed=3))
        assert report.change_points == [70]
        lo, hi = report.intervals[0]
        assert lo <= 70 <= hi

    def test_null_series_usually_clean(self):
        rng = np.random.default_rng(2)
        fired = sum(
            bool(detect(make_slope(rng.normal(0, 1, 168)),
                        MosumConfig(bandwidth=10,
                                    bootstrap_replicates=0)).change_points)
            for _ in range(50))
        assert fired <= 10

    def test_bootstrap_deterministic(self):
        rng = np.random.default_rng(6)
        x = rng.normal(0, 1, 168)
        x[90:] += 3.0
        s = make_slope(x)
        cfg = MosumConfig(bandwidth=10, bootstrap_replicates=200, seed=11)
        a = detect(s, cfg)
        b = detect(s, cfg)
        assert a.change_points == b.change_points
        assert a.intervals == b.intervals

    def test_zero_replicates_degenerate_interval(self):
        x = np.zeros(100)
        x[40:] = 6.0
        report = detect(make_slope(x), MosumConfig(bandwidth=10,
                                                   bootstrap_replicates=0))
        assert report.intervals == [(40, 40)]

    def test_interval_contains_estimate(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            x = rng.normal(0, 1, 168)
            k = int(rng.integers(40, 130))
            x[k:] += 3.0
            report = detect(make_slope(x),
                            MosumConfig(bandwidth=10, bootstrap_replicates=100,
                                        seed=5))
            for point, (lo, hi) in zip(report.change_points, report.intervals):
                assert lo <= point <= hi

    def test_months_in_report(self):
        x = np.zeros(120)
        x[70:] = 4.0
        report = detect(SlopeSeries((2006, 2), x, "slope"),
                        MosumConfig(bandwidth=10, bootstrap_replicates=0))
        assert report.change_point_months() == [(2011, 12)]

    def test_json_serialization(self):
        x = np.zeros(100)
        x[40:] = 6.0
        report = detect(make_slope(x), MosumConfig(bandwidth=10,
                                                   bootstrap_replicates=50))
        doc = report.to_json_dict()
        assert doc["trace"][0] is None
        assert doc["trace"][-1] is None
        assert all(v is None or isinstance(v, float) for v in doc["trace"])
        assert doc["change_points"] == ["2009-06"]
        assert len(doc["intervals"]) == 1
        assert doc["config"]["bandwidth"] == 10


class TestConfigValidation:
    def test_bandwidth(self):
        with pytest.raises(ValueError):
            MosumConfig(bandwidth=1)

    def test_epsilon_domain(self):
        with pytest.raises(ValueError):
            MosumConfig(bandwidth=10, epsilon=0.0)
        with pytest.raises(ValueError):
            MosumConfig(bandwidth=10, epsilon=1.5)

    def test_eta_positive(self):
        with pytest.raises(ValueError):
            MosumConfig(bandwidth=10, eta=0.0)

    def test_variance_rule(self):
        with pytest.raises(ValueError):
            MosumConfig(bandwidth=10, variance_rule="median")

    def test_defaults(self):
        cfg = MosumConfig(bandwidth=10)
        assert cfg.alpha == 0.05
        assert cfg.variance_rule == "average"
        assert cfg.bootstrap_replicates == 1000
