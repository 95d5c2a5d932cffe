import math

import numpy as np
import pytest

from pitchside.search import (
    ContextualPolicy,
    GaussianSearchState,
    NumericStateError,
    ObjectiveError,
    SearchConfig,
    UpdateDiagnostics,
    bounded_kl_update,
    contextual_update,
    fitness_weights,
    kl_gaussian,
    optimize,
    optimize_contextual,
    quadratic_features,
    sample_batch,
)

COV_FLOOR = 1e-12


def gauss(mean, cov, generation=0):
    return GaussianSearchState(
        mean=np.asarray(mean, dtype=float),
        covariance=np.asarray(cov, dtype=float),
        generation=generation,
    )


def kl_quadrature_1d(mu_p, var_p, mu_q, var_q):
    """Numeric oracle: trapezoid integration of p * log(p/q)."""
    lo = min(mu_p, mu_q) - 14 * math.sqrt(max(var_p, var_q))
    hi = max(mu_p, mu_q) + 14 * math.sqrt(max(var_p, var_q))
    x = np.linspace(lo, hi, 400_001)
    log_p = -0.5 * ((x - mu_p) ** 2 / var_p + math.log(2 * math.pi * var_p))
    log_q = -0.5 * ((x - mu_q) ** 2 / var_q + math.log(2 * math.pi * var_q))
    p = np.exp(log_p)
    trapezoid = getattr(np, "trapezoid", np.trapz)
    return float(trapezoid(p * (log_p - log_q), x))


class TestSampling:
    def test_floor_covariance_collapses_to_mean(self):
        state = gauss([1.0, -2.0], np.eye(2) * COV_FLOOR)
        out = sample_batch(state, 50, np.random.default_rng(0))
        assert np.abs(out - state.mean).max() < 1e-5

    def test_monte_carlo_moments(self):
        state = gauss([0.0, 0.0], np.eye(2))
        out = sample_batch(state, 100_000, np.random.default_rng(7))
        assert np.abs(out.mean(axis=0)).max() < 0.02
        cov = np.cov(out.T)
        assert np.abs(cov - np.eye(2)).max() < 0.05

    def test_same_seed_identical(self):
        state = gauss([3.0], [[2.0]])
        a = sample_batch(state, 10, np.random.default_rng(11))
        b = sample_batch(state, 10, np.random.default_rng(11))
        assert np.array_equal(a, b)

    def test_non_spd_rejected(self):
        with pytest.raises(NumericStateError):
            gauss([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])  # eigenvalue -1


class TestKl:
    def test_identical_is_zero(self):
        state = gauss([1.0, 2.0], [[2.0, 0.3], [0.3, 1.0]])
        assert kl_gaussian(state, state) == pytest.approx(0.0, abs=1e-12)

    def test_unit_mean_shift_is_half(self):
        p = gauss([1.0], [[1.0]])
        q = gauss([0.0], [[1.0]])
        assert kl_gaussian(p, q) == pytest.approx(0.5)

    def test_agrees_with_quadrature_on_random_pairs(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            mu_p, mu_q = rng.uniform(-2, 2, size=2)
            var_p, var_q = rng.uniform(0.3, 2.5, size=2)
            closed = kl_gaussian(gauss([mu_p], [[var_p]]), gauss([mu_q], [[var_q]]))
            numeric = kl_quadrature_1d(mu_p, var_p, mu_q, var_q)
            assert closed == pytest.approx(numeric, abs=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            kl_gaussian(gauss([0.0], [[1.0]]), gauss([0.0, 0.0], np.eye(2)))


class TestBoundedUpdate:
    def test_zero_budget_keeps_state(self):
        state = gauss([0.0, 0.0], np.eye(2))
        rng = np.random.default_rng(1)
        samples = sample_batch(state, 20, rng)
        fitn = -np.sum(samples**2, axis=1)
        out = bounded_kl_update(state, samples, fitn, SearchConfig(epsilon=1e-20))
        assert np.abs(out.mean - state.mean).max() < 1e-9
        assert np.abs(out.covariance - state.covariance).max() < 1e-9
        assert out.generation == state.generation + 1

    def test_equal_fitness_candidate_is_sample_mean(self):
        # With all fitnesses equal the weights are uniform, so the candidate
        # mean is the plain sample mean; recompute the interpolation and KL
        # independently to pin the returned state.
        state = gauss([0.0, 0.0], np.eye(2))
        rng = np.random.default_rng(2)
        samples = sample_batch(state, 40, rng)
        fitn = np.full(40, 3.14)
        config = SearchConfig(epsilon=0.05)
        diag = UpdateDiagnostics()
        out = bounded_kl_update(state, samples, fitn, config, diag)

        cand_mean = samples.mean(axis=0)
        centered = samples - cand_mean
        cand_cov = centered.T @ centered / len(samples)
        # Change guard: with the old covariance = I, whitening is trivial and
        # the guard is a plain eigenvalue clip into [0.92, 1/0.92].
        vals, vecs = np.linalg.eigh(cand_cov)
        cand_cov = (vecs * np.clip(vals, 0.92, 1 / 0.92)) @ vecs.T
        t = diag.interpolation
        expect_mean = (1 - t) * state.mean + t * cand_mean
        expect_cov = (1 - t) * state.covariance + t * cand_cov
        assert np.abs(out.mean - expect_mean).max() < 1e-9
        assert np.abs(out.covariance - expect_cov).max() < 1e-7
        assert kl_gaussian(out, state) <= config.epsilon + 1e-6

    def test_bisection_lands_on_the_boundary(self):
        # Dominant far sample forces the unconstrained update outside the
        # trust region; the accepted update must sit at the boundary.
        state = gauss([0.0], [[1.0]])
        samples = np.array([[2.0], [0.1], [-0.1], [0.05]])
        fitn = np.array([100.0, 0.0, 0.0, 0.0])
        config = SearchConfig(epsilon=0.1, elite_temperature=0.05)
        out = bounded_kl_update(state, samples, fitn, config)
        spent = kl_gaussian(out, state)
        assert 0.1 - 1e-6 <= spent <= 0.1 + 1e-9

    def test_trust_region_respected_on_random_updates(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            d = int(rng.integers(1, 5))
            a = rng.normal(size=(d, d))
            state = gauss(rng.normal(size=d), a @ a.T + 0.2 * np.eye(d))
            samples = sample_batch(state, 16, rng)
            fitn = rng.normal(size=16) * rng.uniform(0.1, 50)
            eps = float(rng.uniform(0.01, 1.0))
            out = bounded_kl_update(state, samples, fitn, SearchConfig(epsilon=eps))
            assert kl_gaussian(out, state) <= eps + 1e-6
            assert np.linalg.eigvalsh(out.covariance).min() >= COV_FLOOR * 0.99

    def test_weight_shift_invariance(self):
        state = gauss([0.0, 0.0], np.eye(2))
        samples = sample_batch(state, 20, np.random.default_rng(3))
        fitn = np.random.default_rng(4).normal(size=20)
        config = SearchConfig(epsilon=0.3)
        a = bounded_kl_update(state, samples, fitn, config)
        b = bounded_kl_update(state, samples, fitn + 123.45, config)
        assert np.abs(a.mean - b.mean).max() < 1e-9
        assert np.abs(a.covariance - b.covariance).max() < 1e-9

    def test_degenerate_sample_covariance_floored_and_flagged(self):
        state = gauss([0.0], [[1.0]])
        samples = np.array([[1.0]] * 5)  # zero spread
        fitn = np.zeros(5)
        diag = UpdateDiagnostics()
        out = bounded_kl_update(state, samples, fitn, SearchConfig(epsilon=0.5), diag)
        assert diag.covariance_floored
        assert np.linalg.eigvalsh(out.covariance).min() >= COV_FLOOR * 0.99


class TestOptimize:
    def test_sphere_reaches_near_zero(self):
        config = SearchConfig(epsilon=0.5, samples_per_iteration=20, max_iterations=300, seed=42)
        init = gauss([5.0] * 5, np.eye(5))
        result = optimize(lambda x: -float(np.sum(x * x)), init, config)
        assert result.best_fitness >= -1e-6
        assert all(
            b.best_fitness >= a.best_fitness
            for a, b in zip(result.history, result.history[1:])
        )

    def test_constant_objective_stays_within_budget(self):
        config = SearchConfig(epsilon=0.3, samples_per_iteration=16, max_iterations=40, seed=0)
        init = gauss([1.0, -1.0], np.eye(2))
        result = optimize(lambda x: 7.0, init, config)
        assert all(r.kl_spent <= 0.3 + 1e-6 for r in result.history)
        # Uninformative fitness: uniform weights, so the mean only performs
        # a small sampling-noise random walk (<< the 11-sigma sphere route).
        assert np.abs(result.state.mean - init.mean).max() < 4.0

    def test_deterministic_per_seed(self):
        config = SearchConfig(max_iterations=25, seed=33)
        init = gauss([2.0, 2.0], np.eye(2))
        obj = lambda x: -float(np.sum(x * x))  # noqa: E731
        a = optimize(obj, init, config)
        b = optimize(obj, init, config)
        assert np.array_equal(a.best_parameters, b.best_parameters)
        assert a.history == b.history

    def test_objective_error_carries_parameters(self):
        def bad(x):
            raise ValueError("boom")

        with pytest.raises(ObjectiveError) as err:
            optimize(bad, gauss([0.0], [[1.0]]), SearchConfig(max_iterations=1))
        assert err.value.parameters.shape == (1,)

    def test_history_line_format(self):
        config = SearchConfig(max_iterations=3, seed=1)
        result = optimize(lambda x: -float(np.sum(x * x)), gauss([1.0], [[1.0]]), config)
        line = result.history[0].line()
        assert len(line.split(";")) == 4
        assert line.startswith("0;")


class TestContextual:
    def test_constant_optimum_learns_constant_map(self):
        rng_ctx = lambda rng: float(rng.uniform(0.0, 1.0))  # noqa: E731
        policy = ContextualPolicy(weight_matrix=np.zeros((3, 1)), covariance=np.eye(1))
        config = SearchConfig(epsilon=0.5, samples_per_iteration=20, max_iterations=150, seed=5)
        out, _ = optimize_contextual(
            lambda s, x: -float((x[0] - 4.0) ** 2), policy, config, rng_ctx
        )
        for s in np.linspace(0, 1, 11):
            assert abs(out.mean(float(s))[0] - 4.0) < 1e-2
        assert abs(out.weight_matrix[2, 0]) < 1e-2  # quadratic silent

    def test_linear_optimum_learned(self):
        rng_ctx = lambda rng: float(rng.uniform(0.0, 1.0))  # noqa: E731
        policy = ContextualPolicy(weight_matrix=np.zeros((3, 1)), covariance=np.eye(1))
        config = SearchConfig(epsilon=0.5, samples_per_iteration=20, max_iterations=300, seed=17)
        out, history = optimize_contextual(
            lambda s, x: -float((x[0] - 2.0 * s) ** 2), policy, config, rng_ctx
        )
        errs = [abs(out.mean(float(s))[0] - 2.0 * s) for s in np.linspace(0, 1, 21)]
        assert max(errs) < 0.05
        assert all(r.kl_spent <= 0.5 + 1e-6 for r in history)

    def test_deterministic_per_seed(self):
        rng_ctx = lambda rng: float(rng.uniform(0.0, 1.0))  # noqa: E731
        policy = ContextualPolicy(weight_matrix=np.zeros((3, 1)), covariance=np.eye(1))
        config = SearchConfig(max_iterations=20, seed=3)
        obj = lambda s, x: -float((x[0] - s) ** 2)  # noqa: E731
        a, _ = optimize_contextual(obj, policy, config, rng_ctx)
        b, _ = optimize_contextual(obj, policy, config, rng_ctx)
        assert np.array_equal(a.weight_matrix, b.weight_matrix)
        assert np.array_equal(a.covariance, b.covariance)

    def test_feature_map(self):
        assert np.array_equal(quadratic_features(2.0), np.array([1.0, 2.0, 4.0]))


def test_fitness_weights_uniform_when_flat():
    w = fitness_weights(np.array([3.0, 3.0, 3.0]), 0.3)
    assert np.allclose(w, 1 / 3)
