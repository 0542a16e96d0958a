"""Instance generators and the Gaussian sampling model."""

import math

import numpy as np
import pytest

from matchmap import (
    InstanceParams,
    counterexample_instance,
    experiment1_instance,
    experiment2_instance,
    rep_seed,
    sample_dataset,
)

SIGMA_8 = 0.04419417382415922  # 8**-1.5


def line_params(m=6, n=4, d=3, spacing=1.0, noise=1.0):
    features = np.zeros((m, d))
    features[:, 0] = spacing * np.arange(1, m + 1)
    return InstanceParams(
        features=features, noise_levels=np.full(m, noise), true_map=np.arange(n)
    )


class TestInstanceParams:
    def test_rejects_zero_noise(self):
        with pytest.raises(ValueError, match="positive"):
            InstanceParams(
                features=np.zeros((3, 2)),
                noise_levels=np.zeros(3),
                true_map=np.arange(2),
            )

    def test_rejects_non_injective_map(self):
        with pytest.raises(ValueError, match="injective"):
            InstanceParams(
                features=np.zeros((3, 2)),
                noise_levels=np.ones(3),
                true_map=np.array([1, 1]),
            )

    def test_outlier_bookkeeping(self):
        params = line_params(m=6, n=4)
        assert params.outlier_indices.tolist() == [4, 5]
        assert params.outlier_indices.size == params.m - params.n

    def test_json_round_trip(self):
        params = line_params()
        again = InstanceParams.from_dict(params.to_dict())
        assert np.array_equal(again.features, params.features)
        assert np.array_equal(again.noise_levels, params.noise_levels)
        assert np.array_equal(again.true_map, params.true_map)

    def test_from_dict_checks_declared_sizes(self):
        payload = line_params().to_dict()
        payload["n"] = 99
        with pytest.raises(ValueError, match="declared n"):
            InstanceParams.from_dict(payload)


class TestSampleDataset:
    def test_fixed_seed_reproduces_bit_identical(self):
        params = line_params()
        a = sample_dataset(params, 1234)
        b = sample_dataset(params, 1234)
        assert np.array_equal(a.query, b.query)
        assert np.array_equal(a.reference, b.reference)

    def test_distinct_seeds_differ(self):
        params = line_params()
        a = sample_dataset(params, 1)
        b = sample_dataset(params, 2)
        assert not np.array_equal(a.query, b.query)

    def test_carries_noise_levels_through_true_map(self):
        features = np.zeros((3, 2))
        features[:, 0] = [1.0, 2.0, 3.0]
        params = InstanceParams(
            features=features,
            noise_levels=np.array([0.5, 1.5, 2.5]),
            true_map=np.array([2, 0]),
        )
        data = sample_dataset(params, 0)
        assert data.query_noise.tolist() == [2.5, 0.5]
        assert data.reference_noise.tolist() == [0.5, 1.5, 2.5]

    def test_degenerate_noise_pins_vectors_to_features(self):
        params = line_params(noise=1e-12, m=5, n=3, d=4)
        data = sample_dataset(params, 7)
        drift = np.linalg.norm(data.query - params.features[params.true_map], axis=1)
        assert np.all(drift <= 1e-9 * math.sqrt(params.d))

    def test_normalized_noise_moments(self):
        # law of large numbers on coordinate 1 of the reference noise
        m = 100_000
        params = InstanceParams(
            features=np.zeros((m, 1)),
            noise_levels=np.full(m, 1.7),
            true_map=np.arange(1),
        )
        data = sample_dataset(params, 2024)
        normalized = (data.reference[:, 0] - 0.0) / 1.7
        assert abs(normalized.mean()) < 3 * 10**-2.5
        assert abs(normalized.var() - 1.0) < 0.02


class TestExperiment1:
    def test_full_scale_structure(self):
        params = experiment1_instance(100, 130, 50, seed=3)
        assert (params.n, params.m, params.d) == (100, 130, 50)
        assert params.outlier_indices.tolist() == list(range(100, 130))
        assert np.array_equal(params.true_map, np.arange(100))
        assert np.all((params.noise_levels >= 0.5) & (params.noise_levels <= 2.0))

    def test_outlier_shift_uses_global_index(self):
        # outlier feature i (1-based) is centered near i; inliers near 0
        params = experiment1_instance(10, 14, 400, seed=9)
        for i in params.outlier_indices:
            assert abs(params.features[i].mean() - (i + 1)) < 0.5
        assert abs(params.features[: params.n].mean()) < 0.5

    def test_deterministic_in_seed(self):
        a = experiment1_instance(5, 8, 3, seed=11)
        b = experiment1_instance(5, 8, 3, seed=11)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.noise_levels, b.noise_levels)

    def test_rejects_m_not_larger_than_n(self):
        with pytest.raises(ValueError):
            experiment1_instance(5, 5, 3, seed=0)


class TestExperiment2:
    def test_feature_positions(self):
        params = experiment2_instance(100, 120, 10, a=0.02, b=5.0)
        assert params.features[0].tolist() == [0.02] + [0.0] * 9
        assert params.features[99, 0] == pytest.approx(2.0, rel=1e-12)
        assert params.features[100, 0] == pytest.approx(100 * 0.02 + 5.0, rel=1e-12)

    def test_noise_decay(self):
        params = experiment2_instance(5, 10, 2, a=1.0, b=1.0)
        assert params.noise_levels[0] == 1.0
        assert params.noise_levels[7] == pytest.approx(SIGMA_8, rel=1e-15)

    def test_pure_function(self):
        a = experiment2_instance(4, 6, 3, a=0.5, b=2.0)
        b = experiment2_instance(4, 6, 3, a=0.5, b=2.0)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.noise_levels, b.noise_levels)

    def test_collinear(self):
        params = experiment2_instance(7, 9, 5, a=0.3, b=1.5)
        assert np.all(params.features[:, 1:] == 0.0)


class TestCounterexample:
    def test_noise_levels_are_halving(self):
        params = counterexample_instance(4, 20)
        assert params.noise_levels.tolist() == [1.0, 0.5, 0.25, 0.125, 0.0625]

    def test_m_is_n_plus_one(self):
        params = counterexample_instance(7, 12)
        assert params.m == 8
        assert params.outlier_indices.tolist() == [7]

    def test_consecutive_gap_ratios_exact(self):
        for n, d in ((4, 20), (10, 80), (50, 500)):
            params = counterexample_instance(n, d)
            gaps = np.linalg.norm(np.diff(params.features, axis=0), axis=1)
            denom = np.sqrt(params.noise_levels[:-1] ** 2 + params.noise_levels[1:] ** 2)
            target = math.sqrt(d / 20)
            assert np.allclose(gaps / denom, target, rtol=1e-12, atol=0)

    def test_positions_follow_halving_recurrence(self):
        params = counterexample_instance(5, 36)
        x = params.features[:, 0]
        # position k+1 sits one gap of sqrt(d)*2^-(k+1) below position k
        assert np.array_equal(x[:-1] - x[1:], np.sqrt(36) * np.ldexp(1.0, -np.arange(2, 7)))
        assert x[0] == np.sqrt(36) / 2

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            counterexample_instance(1, 10)


class TestRepSeed:
    def test_deterministic_and_stream_separated(self):
        assert rep_seed(7, 3) == rep_seed(7, 3)
        assert rep_seed(7, 3, stream=0) != rep_seed(7, 3, stream=1)
        assert rep_seed(7, 3) != rep_seed(7, 4)
        assert rep_seed(6, 3) != rep_seed(7, 3)
