import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hullopt import gp

RNG = np.random.default_rng


def dense_posterior_oracle(model, queries):
    """Textbook GP conditional via an explicit matrix inverse; shares only the
    fitted data/params with the production path, not its linear algebra."""
    k = gp.kernel_matrix(model.params, model.x_train)
    k += (model.params.noise_variance + model.jitter) * np.eye(len(k))
    k_inv = np.linalg.inv(k)
    qn = model.normalize(np.atleast_2d(queries))
    k_star = gp.kernel_matrix(model.params, model.x_train, qn)
    mean = model.y_shift + model.y_scale * (k_star.T @ k_inv @ model.y_train)
    var = model.params.signal_variance - np.sum(k_star * (k_inv @ k_star), axis=0)
    std = model.y_scale * np.sqrt(np.maximum(var, 0.0))
    return mean, std


def random_dataset(rng, n, d=7):
    x = rng.uniform(size=(n, d))
    y = np.sin(3 * x[:, 0]) + x[:, 1] ** 2 + 0.3 * rng.normal(size=n)
    return x, y


class TestKernel:
    def test_zero_distance_gives_signal_variance(self):
        params = gp.KernelParams(2.5, np.full(7, 0.7))
        a = np.full(7, 0.3)
        assert gp.kernel_eval(params, a, a) == pytest.approx(2.5, rel=1e-12)

    @given(st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_symmetry(self, seed):
        rng = RNG(seed)
        params = gp.KernelParams(float(rng.uniform(0.1, 3.0)), rng.uniform(0.05, 2.0, 7))
        a, b = rng.uniform(size=7), rng.uniform(size=7)
        assert gp.kernel_eval(params, a, b) == pytest.approx(gp.kernel_eval(params, b, a), rel=1e-12)

    def test_unit_distance_value(self):
        # (1 + sqrt5 + 5/3) * exp(-sqrt5) evaluated directly
        params = gp.KernelParams(1.0, np.ones(7))
        a = np.zeros(7)
        b = np.eye(7)[0]
        assert gp.kernel_eval(params, a, b) == pytest.approx(0.5239941089, abs=1e-9)

    def test_rejects_nonpositive_params(self):
        with pytest.raises(ValueError):
            gp.KernelParams(-1.0, np.ones(7))
        with pytest.raises(ValueError):
            gp.KernelParams(1.0, np.zeros(7))
        with pytest.raises(ValueError):
            gp.KernelParams(1.0, np.ones(7), noise_variance=0.0)


class TestFit:
    def test_single_point(self):
        model = gp.fit(np.array([[0.5] * 7]), np.array([3.2]), optimize_hyperparams=False)
        assert model.y_train == pytest.approx([0.0])
        mean, std = gp.posterior(model, np.full(7, 0.5))
        assert mean == pytest.approx(3.2, rel=1e-6)

    def test_deterministic_given_seed(self):
        x, y = random_dataset(RNG(1), 15)
        m1 = gp.fit(x, y, seed=7)
        m2 = gp.fit(x, y, seed=7)
        assert m1.params.signal_variance == m2.params.signal_variance
        assert np.array_equal(m1.params.lengthscales, m2.params.lengthscales)

    def test_optimization_never_hurts_likelihood(self):
        for seed in range(20):
            x, y = random_dataset(RNG(seed), 12)
            fixed = gp.fit(x, y, optimize_hyperparams=False)
            tuned = gp.fit(x, y, optimize_hyperparams=True, seed=seed)
            assert gp.log_marginal_likelihood(tuned) >= gp.log_marginal_likelihood(fixed) - 1e-9

    def test_duplicate_rows_rejected(self):
        x = np.array([[0.1] * 7, [0.1] * 7, [0.5] * 7])
        with pytest.raises(ValueError, match="duplicate"):
            gp.fit(x, np.array([1.0, 2.0, 3.0]))

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            gp.fit(np.zeros((3, 7)), np.zeros(2))


class TestPosterior:
    def test_interpolates_training_data(self):
        rng = RNG(2)
        x, y = random_dataset(rng, 10)
        params = gp.KernelParams(1.0, np.full(7, 0.5), noise_variance=1e-8)
        model = gp.fit(x, y, optimize_hyperparams=False, init_params=params)
        scale = float(np.std(y))
        for i in range(10):
            mean, std = gp.posterior(model, x[i])
            assert mean == pytest.approx(y[i], abs=1e-4 * max(abs(y[i]), 1e-3))
            assert std <= 1e-3 * scale

    def test_reverts_to_prior_far_from_data(self):
        rng = RNG(3)
        x = rng.uniform(0.0, 0.2, size=(8, 7))
        y = rng.normal(2.0, 0.5, size=8)
        params = gp.KernelParams(1.0, np.full(7, 0.05))
        model = gp.fit(x, y, optimize_hyperparams=False, init_params=params)
        mean, std = gp.posterior(model, np.full(7, 0.9))  # > 10 lengthscales away
        assert mean == pytest.approx(float(np.mean(y)), rel=0.01)
        assert std == pytest.approx(float(np.std(y)), rel=0.01)  # sqrt(sf2) * y_scale

    def test_matches_dense_inverse_oracle(self):
        for seed in range(20):
            rng = RNG(seed + 100)
            x, y = random_dataset(rng, int(rng.integers(3, 21)))
            model = gp.fit(x, y, seed=seed)
            q = rng.uniform(size=(5, 7))
            mean, std = gp.posterior(model, q)
            omean, ostd = dense_posterior_oracle(model, q)
            assert np.allclose(mean, omean, atol=1e-8, rtol=1e-8)
            assert np.allclose(std, ostd, atol=1e-8, rtol=1e-8)

    def test_variance_never_exceeds_prior(self):
        for seed in range(100):
            rng = RNG(seed)
            x, y = random_dataset(rng, int(rng.integers(2, 16)))
            model = gp.fit(x, y, seed=seed)
            _, std = gp.posterior(model, rng.uniform(size=(50, 7)))
            prior_std = model.y_scale * math.sqrt(model.params.signal_variance)
            assert np.all(std ** 2 <= prior_std ** 2 + 1e-9)

    def test_std_invariant_under_output_shift(self):
        rng = RNG(11)
        x, y = random_dataset(rng, 12)
        params = gp.KernelParams(1.3, np.full(7, 0.4))
        q = rng.uniform(size=(20, 7))
        m0 = gp.fit(x, y, optimize_hyperparams=False, init_params=params)
        m1 = gp.fit(x, y + 57.0, optimize_hyperparams=False, init_params=params)
        _, s0 = gp.posterior(m0, q)
        _, s1 = gp.posterior(m1, q)
        assert np.allclose(s0, s1, rtol=1e-10)


class TestLogMarginalLikelihood:
    def test_single_point_closed_form(self):
        model = gp.fit(np.array([[0.5] * 7]), np.array([4.0]), optimize_hyperparams=False)
        # standardized y is 0, k(0) = 1 + (noise + jitter) -> -0.5*log(2*pi) as noise -> 0
        assert gp.log_marginal_likelihood(model) == pytest.approx(-0.9189385, abs=1e-6)

    def test_invariant_under_row_permutation(self):
        rng = RNG(4)
        x, y = random_dataset(rng, 9)
        params = gp.KernelParams(1.0, np.full(7, 0.5))
        perm = rng.permutation(9)
        m0 = gp.fit(x, y, optimize_hyperparams=False, init_params=params)
        m1 = gp.fit(x[perm], y[perm], optimize_hyperparams=False, init_params=params)
        assert gp.log_marginal_likelihood(m0) == pytest.approx(gp.log_marginal_likelihood(m1), rel=1e-10)

    def test_inflated_noise_hurts_well_fit_data(self):
        rng = RNG(5)
        x = rng.uniform(size=(15, 7))
        y = np.sum(x, axis=1)  # smooth, noiseless
        tight = gp.fit(x, y, optimize_hyperparams=False,
                       init_params=gp.KernelParams(1.0, np.full(7, 1.0), 1e-6))
        loose = gp.fit(x, y, optimize_hyperparams=False,
                       init_params=gp.KernelParams(1.0, np.full(7, 1.0), 1e-4))
        assert gp.log_marginal_likelihood(loose) < gp.log_marginal_likelihood(tight)


class TestNormalization:
    def test_bounds_normalization_matches_manual(self):
        rng = RNG(6)
        bounds = [(0.0, 0.2)] * 6 + [(0.01, 0.9)]
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        x = rng.uniform(lo, hi, size=(10, 7))
        y = rng.normal(size=10)
        model = gp.fit(x, y, bounds=bounds, optimize_hyperparams=False)
        assert np.all(model.x_train >= 0) and np.all(model.x_train <= 1)
        assert np.allclose(model.x_train, (x - lo) / (hi - lo))
