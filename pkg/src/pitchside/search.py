"""Black-box stochastic search with information-theoretic trust regions.

The search distribution is a multivariate Gaussian.  Each update forms the
exponentially-tilted weighted maximum-likelihood Gaussian of the sampled
population and then pulls it back toward the previous distribution along a
straight-line interpolation of (mean, covariance), with the interpolation
coefficient found by bisection so that KL(new || old) never exceeds the
per-update budget.  Two guards keep the update healthy: an absolute
eigenvalue floor maintains positive definiteness, and a relative
determinant floor caps the per-update entropy loss (selection pressure
alone would shrink the covariance geometrically and stall the mean far
from the optimum).

The contextual variant conditions the mean on task-context features
phi(s) = (1, s, s^2) through a ridge-regressed weight matrix and bounds the
expected KL over the observed contexts with the same mechanism.

This is a concrete mechanism honoring the bounded-change principle, not a
reproduction of any specific published update rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

COV_FLOOR = 1e-12
KL_SLACK = 1e-6
# Budgets below double-precision KL resolution degenerate to the identity
# update: the zero-trust-region limit keeps the distribution fixed.
ZERO_EPSILON = 1e-14


class NumericStateError(ValueError):
    pass


class ObjectiveError(RuntimeError):
    def __init__(self, message: str, parameters: np.ndarray):
        super().__init__(f"{message} at parameters {parameters!r}")
        self.parameters = parameters


@dataclass
class GaussianSearchState:
    mean: np.ndarray
    covariance: np.ndarray
    generation: int = 0

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.covariance = np.asarray(self.covariance, dtype=float)
        d = self.mean.shape[0]
        if self.covariance.shape != (d, d):
            raise NumericStateError(
                f"covariance shape {self.covariance.shape} does not match dimension {d}"
            )
        if not np.allclose(self.covariance, self.covariance.T, atol=1e-10):
            raise NumericStateError("covariance must be symmetric")
        if np.linalg.eigvalsh(self.covariance).min() < COV_FLOOR / 2:
            raise NumericStateError("covariance is not positive definite above the floor")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass
class SearchConfig:
    epsilon: float = 0.5  # KL budget per update, nats
    samples_per_iteration: int = 20
    elite_temperature: float = 0.3  # scales the fitness IQR into the tilt
    max_iterations: int = 300
    seed: int = 0
    target_fitness: float | None = None
    ridge: float = 1e-8

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.samples_per_iteration < 2:
            raise ValueError("need at least 2 samples per iteration")
        if self.elite_temperature <= 0:
            raise ValueError("elite temperature must be positive")


def sample_batch(state: GaussianSearchState, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws from the search distribution; (n, d) array."""
    if n < 1:
        raise ValueError("n must be >= 1")
    try:
        chol = np.linalg.cholesky(state.covariance)
    except np.linalg.LinAlgError as exc:
        raise NumericStateError(f"covariance is not SPD: {exc}") from exc
    z = rng.standard_normal((n, state.dim))
    return state.mean + z @ chol.T


def kl_gaussian(p: GaussianSearchState, q: GaussianSearchState) -> float:
    """Closed-form KL(p || q) in nats."""
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    return _kl_parts(p.mean, p.covariance, q.mean, q.covariance)


def _kl_parts(mu_p, cov_p, mu_q, cov_q) -> float:
    d = mu_p.shape[0]
    chol_q = np.linalg.cholesky(cov_q)
    solved = np.linalg.solve(cov_q, cov_p)
    trace = np.trace(solved)
    diff = mu_q - mu_p
    maha = diff @ np.linalg.solve(cov_q, diff)
    logdet_q = 2.0 * np.sum(np.log(np.diag(chol_q)))
    sign, logdet_p = np.linalg.slogdet(cov_p)
    if sign <= 0:
        raise NumericStateError("non-positive-definite covariance in KL")
    return 0.5 * (trace + maha - d + logdet_q - logdet_p)


def fitness_weights(fitnesses: np.ndarray, temperature_scale: float) -> np.ndarray:
    """Exponential tilting, shift-invariant, temperature set by the IQR."""
    f = np.asarray(fitnesses, dtype=float)
    q75, q25 = np.percentile(f, [75, 25])
    spread = q75 - q25
    if spread <= 0:
        spread = f.max() - f.min()
    if spread <= 0:
        return np.full(f.shape, 1.0 / len(f))
    w = np.exp((f - f.max()) / (temperature_scale * spread))
    return w / w.sum()


def floor_covariance(cov: np.ndarray, floor: float = COV_FLOOR) -> tuple[np.ndarray, bool]:
    vals, vecs = np.linalg.eigh((cov + cov.T) / 2.0)
    if vals.min() >= floor:
        return (cov + cov.T) / 2.0, False
    vals = np.maximum(vals, floor)
    return (vecs * vals) @ vecs.T, True


# Candidate covariances may change along any direction by at most this
# factor (shrink) or its inverse (growth) relative to the previous
# covariance, checked in the previous covariance's whitened space.  The
# shrink side prevents premature convergence; the growth side keeps an
# uninformative population from inflating the search by random walk.
ENTROPY_SHRINK_BETA = 0.92


def entropy_floor(cand_cov: np.ndarray, old_cov: np.ndarray, beta: float = ENTROPY_SHRINK_BETA) -> np.ndarray:
    vals_o, vecs_o = np.linalg.eigh((old_cov + old_cov.T) / 2.0)
    vals_o = np.maximum(vals_o, COV_FLOOR)
    inv_sqrt = (vecs_o * (vals_o**-0.5)) @ vecs_o.T
    sqrt_o = (vecs_o * (vals_o**0.5)) @ vecs_o.T
    m = inv_sqrt @ cand_cov @ inv_sqrt
    vals, vecs = np.linalg.eigh((m + m.T) / 2.0)
    if beta <= vals.min() and vals.max() <= 1.0 / beta:
        return cand_cov
    clipped = (vecs * np.clip(vals, beta, 1.0 / beta)) @ vecs.T
    return sqrt_o @ clipped @ sqrt_o


@dataclass
class UpdateDiagnostics:
    kl_spent: float = 0.0
    interpolation: float = 1.0
    covariance_floored: bool = False


def bounded_kl_update(
    state: GaussianSearchState,
    samples: np.ndarray,
    fitnesses: np.ndarray,
    config: SearchConfig,
    diagnostics: UpdateDiagnostics | None = None,
) -> GaussianSearchState:
    """Weighted-ML candidate pulled inside the KL trust region by bisection."""
    samples = np.asarray(samples, dtype=float)
    fitnesses = np.asarray(fitnesses, dtype=float)
    if len(samples) != len(fitnesses) or len(samples) < 2:
        raise ValueError("need matching samples/fitnesses, at least 2")
    if config.epsilon <= ZERO_EPSILON:
        if diagnostics is not None:
            diagnostics.kl_spent = 0.0
            diagnostics.interpolation = 0.0
        return GaussianSearchState(
            mean=state.mean.copy(),
            covariance=state.covariance.copy(),
            generation=state.generation + 1,
        )

    w = fitness_weights(fitnesses, config.elite_temperature)
    cand_mean = w @ samples
    centered = samples - cand_mean
    cand_cov = (centered.T * w) @ centered
    cand_cov, floored = floor_covariance(cand_cov)
    cand_cov = entropy_floor(cand_cov, state.covariance)

    def interp(t: float) -> tuple[np.ndarray, np.ndarray]:
        mean = (1.0 - t) * state.mean + t * cand_mean
        cov = (1.0 - t) * state.covariance + t * cand_cov
        return mean, cov

    def kl_at(t: float) -> float:
        mean, cov = interp(t)
        return _kl_parts(mean, cov, state.mean, state.covariance)

    if kl_at(1.0) <= config.epsilon:
        t_star = 1.0
    else:
        lo, hi = 0.0, 1.0  # kl(0) = 0 <= epsilon < kl(1)
        for _ in range(80):
            mid = (lo + hi) / 2.0
            if kl_at(mid) <= config.epsilon:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-12:
                break
        t_star = lo

    mean, cov = interp(t_star)
    cov, floored2 = floor_covariance(cov)
    spent = _kl_parts(mean, cov, state.mean, state.covariance)
    if diagnostics is not None:
        diagnostics.kl_spent = spent
        diagnostics.interpolation = t_star
        diagnostics.covariance_floored = floored or floored2
    return GaussianSearchState(mean=mean, covariance=cov, generation=state.generation + 1)


# --- contextual variant -----------------------------------------------------

def quadratic_features(s: float | np.ndarray) -> np.ndarray:
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.size != 1:
        raise ValueError("scalar contexts only")
    return np.array([1.0, s[0], s[0] ** 2])


@dataclass
class ContextualPolicy:
    weight_matrix: np.ndarray  # (k, d): phi(s) @ W = mean
    covariance: np.ndarray  # shared (d, d)
    feature_map: Callable[[float], np.ndarray] = quadratic_features
    generation: int = 0

    def __post_init__(self):
        self.weight_matrix = np.asarray(self.weight_matrix, dtype=float)
        self.covariance = np.asarray(self.covariance, dtype=float)
        k = self.feature_map(0.0).shape[0]
        if self.weight_matrix.shape[0] != k:
            raise NumericStateError(
                f"weight matrix rows {self.weight_matrix.shape[0]} != feature dim {k}"
            )

    @property
    def dim(self) -> int:
        return self.weight_matrix.shape[1]

    def mean(self, context: float) -> np.ndarray:
        return self.feature_map(context) @ self.weight_matrix

    def sample(self, context: float, rng: np.random.Generator) -> np.ndarray:
        chol = np.linalg.cholesky(self.covariance)
        return self.mean(context) + chol @ rng.standard_normal(self.dim)


@dataclass
class ContextualDiagnostics:
    kl_spent: float = 0.0
    interpolation: float = 1.0
    regularization_engaged: bool = False


def contextual_update(
    policy: ContextualPolicy,
    contexts: np.ndarray,
    samples: np.ndarray,
    fitnesses: np.ndarray,
    config: SearchConfig,
    diagnostics: ContextualDiagnostics | None = None,
) -> ContextualPolicy:
    """Weighted ridge regression of samples on phi(context), expected-KL
    bounded over the observed contexts."""
    contexts = np.asarray(contexts, dtype=float).reshape(-1)
    samples = np.asarray(samples, dtype=float)
    fitnesses = np.asarray(fitnesses, dtype=float)
    if not (len(contexts) == len(samples) == len(fitnesses)):
        raise ValueError("contexts, samples and fitnesses must align")

    w = fitness_weights(fitnesses, config.elite_temperature)
    phi = np.stack([policy.feature_map(s) for s in contexts])  # (n, k)
    k = phi.shape[1]
    gram = (phi.T * w) @ phi
    ridge = config.ridge
    cond = np.linalg.cond(gram + ridge * np.eye(k))
    regularized = False
    while cond > 1e12:
        ridge *= 100.0
        cond = np.linalg.cond(gram + ridge * np.eye(k))
        regularized = True
    cand_w = np.linalg.solve(gram + ridge * np.eye(k), (phi.T * w) @ samples)
    residuals = samples - phi @ cand_w
    cand_cov = (residuals.T * w) @ residuals
    cand_cov, _ = floor_covariance(cand_cov)
    cand_cov = entropy_floor(cand_cov, policy.covariance)

    def interp(t: float):
        return (
            (1.0 - t) * policy.weight_matrix + t * cand_w,
            (1.0 - t) * policy.covariance + t * cand_cov,
        )

    def expected_kl(t: float) -> float:
        new_w, new_cov = interp(t)
        total = 0.0
        for f in phi:
            total += _kl_parts(f @ new_w, new_cov, f @ policy.weight_matrix, policy.covariance)
        return total / len(phi)

    if expected_kl(1.0) <= config.epsilon:
        t_star = 1.0
    else:
        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = (lo + hi) / 2.0
            if expected_kl(mid) <= config.epsilon:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-12:
                break
        t_star = lo

    new_w, new_cov = interp(t_star)
    new_cov, _ = floor_covariance(new_cov)
    if diagnostics is not None:
        diagnostics.kl_spent = expected_kl(t_star)
        diagnostics.interpolation = t_star
        diagnostics.regularization_engaged = regularized
    return ContextualPolicy(
        weight_matrix=new_w,
        covariance=new_cov,
        feature_map=policy.feature_map,
        generation=policy.generation + 1,
    )


# --- optimization loops ------------------------------------------------------

@dataclass(frozen=True)
class HistoryRecord:
    iteration: int
    best_fitness: float
    mean_fitness: float
    kl_spent: float

    def line(self) -> str:
        return (
            f"{self.iteration};{self.best_fitness:.9g};"
            f"{self.mean_fitness:.9g};{self.kl_spent:.9g}"
        )


@dataclass
class OptimizeResult:
    best_parameters: np.ndarray
    best_fitness: float
    history: list[HistoryRecord]
    state: GaussianSearchState

    def history_text(self) -> str:
        return "\n".join(r.line() for r in self.history) + "\n"


def optimize(
    objective: Callable[[np.ndarray], float],
    init: GaussianSearchState,
    config: SearchConfig,
) -> OptimizeResult:
    """Iterated sample/update loop with elitist best-so-far bookkeeping."""
    rng = np.random.default_rng(config.seed)
    state = init
    best_x = np.array(init.mean, copy=True)
    best_f = -math.inf
    history: list[HistoryRecord] = []

    for iteration in range(config.max_iterations):
        samples = sample_batch(state, config.samples_per_iteration, rng)
        fitnesses = np.empty(len(samples))
        for i, x in enumerate(samples):
            try:
                fitnesses[i] = objective(x)
            except Exception as exc:
                raise ObjectiveError(str(exc), x) from exc
        i_best = int(np.argmax(fitnesses))
        if fitnesses[i_best] > best_f:
            best_f = float(fitnesses[i_best])
            best_x = samples[i_best].copy()
        diag = UpdateDiagnostics()
        state = bounded_kl_update(state, samples, fitnesses, config, diag)
        history.append(
            HistoryRecord(
                iteration=iteration,
                best_fitness=best_f,
                mean_fitness=float(fitnesses.mean()),
                kl_spent=diag.kl_spent,
            )
        )
        if config.target_fitness is not None and best_f >= config.target_fitness:
            break

    return OptimizeResult(best_parameters=best_x, best_fitness=best_f, history=history, state=state)


def optimize_contextual(
    objective: Callable[[float, np.ndarray], float],
    policy: ContextualPolicy,
    config: SearchConfig,
    context_sampler: Callable[[np.random.Generator], float],
    evaluations_per_sample: int = 1,
) -> tuple[ContextualPolicy, list[HistoryRecord]]:
    """Contextual loop: per iteration, fresh contexts are drawn, one sample
    per context, each evaluated ``evaluations_per_sample`` times and
    averaged (matching the noisy-return protocol of simulator objectives)."""
    rng = np.random.default_rng(config.seed)
    history: list[HistoryRecord] = []
    best_f = -math.inf

    for iteration in range(config.max_iterations):
        contexts = np.array(
            [context_sampler(rng) for _ in range(config.samples_per_iteration)]
        )
        samples = np.stack([policy.sample(s, rng) for s in contexts])
        fitnesses = np.empty(len(samples))
        for i, (s, x) in enumerate(zip(contexts, samples)):
            total = 0.0
            for _ in range(evaluations_per_sample):
                total += objective(s, x)
            fitnesses[i] = total / evaluations_per_sample
        best_f = max(best_f, float(fitnesses.max()))
        diag = ContextualDiagnostics()
        policy = contextual_update(policy, contexts, samples, fitnesses, config, diag)
        history.append(
            HistoryRecord(
                iteration=iteration,
                best_fitness=best_f,
                mean_fitness=float(fitnesses.mean()),
                kl_spent=diag.kl_spent,
            )
        )
    return policy, history
