"""Separation distances, detection thresholds, Hamming loss, chi-squared tail."""

import math

import numpy as np
import pytest

from matchmap import (
    InstanceParams,
    Regime,
    chi_square_tail,
    compute_separation,
    counterexample_instance,
    experiment2_instance,
    hamming_loss,
    threshold_lsl,
    threshold_lsns,
    threshold_mild,
)

# frozen direct-formula evaluations
THR_LSNS_FULL_SCALE = 21.57619314090602  # (100, 130, 50, 0.05)
THR_LSL_FULL_SCALE = 36.425331893479026
THR_MILD_IN_IN = 25.03861080410435
THR_MILD_IN_OUT_R4 = 67.39772968389748
CHI_LOWER_100_LN20 = 34.6163676520457


def brute_force_separation(params):
    """O(m^2 d) reference enumeration of the two minima."""
    inliers = set(params.true_map.tolist())
    kin, kout = math.inf, math.inf
    for i in range(params.m):
        for j in range(params.m):
            if i == j:
                continue
            ratio = np.linalg.norm(params.features[i] - params.features[j]) / math.sqrt(
                params.noise_levels[i] ** 2 + params.noise_levels[j] ** 2
            )
            if i in inliers and j in inliers:
                kin = min(kin, ratio)
            elif i in inliers and j not in inliers:
                kout = min(kout, ratio)
    return kin, (None if math.isinf(kout) else kout)


class TestComputeSeparation:
    def test_counterexample_kappas_are_one_at_d20(self):
        report = compute_separation(counterexample_instance(4, 20))
        assert report.kappa_in_in == pytest.approx(1.0, rel=1e-12)
        assert report.kappa_in_out == pytest.approx(1.0, rel=1e-12)

    def test_identical_features_give_zero(self):
        features = np.zeros((3, 2))
        features[2, 0] = 5.0
        params = InstanceParams(
            features=features, noise_levels=np.ones(3), true_map=np.arange(2)
        )
        assert compute_separation(params).kappa_in_in == 0.0

    def test_matches_enumeration_on_exp2(self):
        params = experiment2_instance(3, 4, 2, a=1.0, b=1.0)
        report = compute_separation(params)
        kin, kout = brute_force_separation(params)
        assert report.kappa_in_in == pytest.approx(kin, rel=1e-12)
        assert report.kappa_in_out == pytest.approx(kout, rel=1e-12)

    def test_matches_enumeration_on_random_instances(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            m = int(rng.integers(3, 50))
            n = int(rng.integers(2, m))
            params = InstanceParams(
                features=rng.normal(size=(m, 4)),
                noise_levels=rng.uniform(0.2, 3.0, m),
                true_map=rng.permutation(m)[:n],
            )
            report = compute_separation(params)
            kin, kout = brute_force_separation(params)
            assert report.kappa_in_in == pytest.approx(kin, rel=1e-12)
            if kout is None:
                assert report.kappa_in_out is None
            else:
                assert report.kappa_in_out == pytest.approx(kout, rel=1e-12)

    def test_no_outliers_reports_absent(self):
        params = InstanceParams(
            features=np.random.default_rng(0).normal(size=(4, 2)),
            noise_levels=np.ones(4),
            true_map=np.arange(4),
        )
        assert compute_separation(params).kappa_in_out is None

    def test_scale_equivariance(self):
        rng = np.random.default_rng(23)
        params = InstanceParams(
            features=rng.normal(size=(8, 3)),
            noise_levels=rng.uniform(0.5, 2, 8),
            true_map=np.arange(5),
        )
        lam = 37.5
        scaled = InstanceParams(
            features=lam * params.features,
            noise_levels=lam * params.noise_levels,
            true_map=params.true_map,
        )
        base, moved = compute_separation(params), compute_separation(scaled)
        assert moved.kappa_in_in == pytest.approx(base.kappa_in_in, rel=1e-12)
        assert moved.kappa_in_out == pytest.approx(base.kappa_in_out, rel=1e-12)


class TestThresholdLsns:
    def test_full_scale_value(self):
        assert threshold_lsns(100, 130, 50, 0.05) == pytest.approx(
            THR_LSNS_FULL_SCALE, rel=1e-12
        )

    def test_monotone_in_d(self):
        values = [threshold_lsns(100, 130, d, 0.05) for d in (1, 10, 50, 200, 1000)]
        assert all(x <= y for x, y in zip(values, values[1:]))

    def test_monotone_in_alpha(self):
        values = [threshold_lsns(100, 130, 50, a) for a in (0.01, 0.05, 0.2, 0.9)]
        assert all(x >= y for x, y in zip(values, values[1:]))

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            threshold_lsns(10, 12, 5, 0.0)
        with pytest.raises(ValueError):
            threshold_lsns(10, 12, 5, 1.0)


class TestThresholdLsl:
    def test_full_scale_value(self):
        assert threshold_lsl(100, 130, 50, 0.05) == pytest.approx(
            THR_LSL_FULL_SCALE, rel=1e-12
        )

    def test_dominates_lsns_threshold(self):
        for n, m, d in ((5, 6, 1), (20, 24, 16), (100, 130, 50), (100, 130, 2000)):
            assert threshold_lsl(n, m, d, 0.05) > threshold_lsns(n, m, d, 0.05)

    def test_rejects_alpha_at_least_half(self):
        with pytest.raises(ValueError, match="1/2"):
            threshold_lsl(10, 12, 5, 0.6)

    def test_growth_rates_on_grid(self):
        # sqrt(d) scale for the log criterion, (d log)^(1/4) for the normalized one
        n = m = 100
        alpha = 0.05
        for d in (64, 256, 1024):
            assert 1.0 <= threshold_lsl(n, m, d, alpha) / math.sqrt(d) <= 15.0
            ratio = threshold_lsns(n, m, d, alpha) / (d * math.log(4 * n * m / alpha)) ** 0.25
            assert 4.0 <= ratio <= 8.1


class TestThresholdMild:
    def test_full_scale_values(self):
        t = threshold_mild(100, 130, 50, 0.05, r_sigma=4.0)
        assert t.t_in_in == pytest.approx(THR_MILD_IN_IN, rel=1e-12)
        assert t.t_in_out == pytest.approx(THR_MILD_IN_OUT_R4, rel=1e-12)
        assert t.regime is Regime.MILD_HETERO

    def test_homoscedastic_limit_collapses(self):
        t = threshold_mild(100, 130, 50, 0.05, r_sigma=1.0)
        assert t.t_in_out == pytest.approx(t.t_in_in, rel=1e-12)

    def test_nondecreasing_in_r_sigma(self):
        values = [threshold_mild(50, 60, 30, 0.05, r).t_in_out for r in (1.0, 2.0, 4.0, 16.0)]
        assert all(x <= y for x, y in zip(values, values[1:]))

    def test_rejects_r_below_one(self):
        with pytest.raises(ValueError):
            threshold_mild(10, 12, 5, 0.05, r_sigma=0.9)


class TestHammingLoss:
    def test_identical_maps(self):
        assert hamming_loss(np.array([0, 1, 2]), np.array([0, 1, 2])) == 0

    def test_two_swapped(self):
        assert hamming_loss(np.array([0, 1, 2]), np.array([1, 0, 2])) == 2

    def test_range_and_zero_iff_equal(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 8))
            a, b = rng.permutation(10)[:n], rng.permutation(10)[:n]
            loss = hamming_loss(a, b)
            assert 0 <= loss <= n
            assert (loss == 0) == np.array_equal(a, b)

    def test_rejects_domain_mismatch(self):
        with pytest.raises(ValueError, match="different domains"):
            hamming_loss(np.array([0, 1]), np.array([0, 1, 2]))


class TestChiSquareTail:
    def test_direct_value(self):
        lower, upper = chi_square_tail(100, math.log(20))
        assert lower == pytest.approx(CHI_LOWER_100_LN20, rel=1e-12)
        assert upper == pytest.approx(CHI_LOWER_100_LN20 + 2 * math.log(20), rel=1e-12)

    def test_vanishes_as_x_to_zero(self):
        lower, upper = chi_square_tail(50, 1e-16)
        assert lower < 1e-6 and upper < 1e-6

    def test_monte_carlo_bound_holds(self):
        # lower-tail bound at level exp(-x) = 1/20, d = 100
        rng = np.random.default_rng(314)
        draws = rng.chisquare(100, size=100_000)
        lower, _ = chi_square_tail(100, math.log(20))
        empirical = np.mean(draws - 100 <= -lower)
        assert empirical <= 0.05 + 3 * math.sqrt(0.05 * 0.95 / 100_000)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            chi_square_tail(0, 1.0)
        with pytest.raises(ValueError):
            chi_square_tail(5, 0.0)
