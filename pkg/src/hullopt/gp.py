"""Gaussian-process regression surrogate with a Matern 5/2 ARD kernel.

Inputs are min-max normalized to the unit cube by the design-space bounds and
outputs are z-scored before fitting; the posterior is de-standardized back to
physical units. Hyperparameters are chosen by maximizing the log marginal
likelihood with a seeded multi-start compass search in log-parameter space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.spatial.distance import cdist

LENGTHSCALE_BOUNDS = (0.05, 10.0)
SIGNAL_BOUNDS = (1e-3, 1e3)     # search range; any positive value is accepted
NOISE_FLOOR = 1e-8
DEFAULT_NOISE = 1e-6            # drag evaluator is deterministic
JITTER_LADDER = (1e-8, 1e-7, 1e-6, 1e-5, 1e-4)
DUPLICATE_TOL = 1e-12

_SQRT5 = math.sqrt(5.0)
_N_STARTS = 16


@dataclass
class KernelParams:
    """Matern 5/2 ARD hyperparameters on normalized inputs / standardized outputs."""

    signal_variance: float = 1.0
    lengthscales: np.ndarray = field(default_factory=lambda: np.full(7, 0.5))
    noise_variance: float = DEFAULT_NOISE

    def __post_init__(self):
        self.lengthscales = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        if not (self.signal_variance > 0):
            raise ValueError("signal_variance must be positive")
        if np.any(self.lengthscales < LENGTHSCALE_BOUNDS[0]) or np.any(self.lengthscales > LENGTHSCALE_BOUNDS[1]):
            raise ValueError(f"lengthscales must lie in {LENGTHSCALE_BOUNDS}")
        if not (self.noise_variance >= NOISE_FLOOR):
            raise ValueError(f"noise_variance must be >= {NOISE_FLOOR}")


def kernel_matrix(params: KernelParams, a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    a = np.atleast_2d(a) / params.lengthscales
    b = a if b is None else np.atleast_2d(b) / params.lengthscales
    rho = np.sqrt(np.maximum(cdist(a, b, "sqeuclidean"), 0.0))
    return params.signal_variance * (1.0 + _SQRT5 * rho + 5.0 / 3.0 * rho * rho) * np.exp(-_SQRT5 * rho)


def kernel_eval(params: KernelParams, a, b) -> float:
    """Covariance between two points in the (normalized) input space."""
    return float(kernel_matrix(params, np.atleast_2d(a), np.atleast_2d(b))[0, 0])


@dataclass
class GpModel:
    """Fitted surrogate; immutable by convention, queries are pure."""

    x_train: np.ndarray          # n x d, normalized to the unit cube
    y_train: np.ndarray          # n, standardized
    y_shift: float               # de-standardization: y = y_shift + y_scale * y_std
    y_scale: float
    params: KernelParams
    chol: np.ndarray             # lower Cholesky factor of K + (noise + jitter) I
    alpha: np.ndarray            # (K + (noise + jitter) I)^-1 y_train
    lo: np.ndarray               # input bounds used for normalization
    hi: np.ndarray
    jitter: float

    def normalize(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo)


def _chol_with_jitter(k: np.ndarray, noise: float) -> tuple[np.ndarray, float]:
    for jitter in JITTER_LADDER:
        try:
            shifted = k + (noise + jitter) * np.eye(len(k))
            return cholesky(shifted, lower=True), jitter
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError(
        f"kernel matrix not positive definite even with jitter {JITTER_LADDER[-1]:g}")


def _lml_value(xn: np.ndarray, ys: np.ndarray, params: KernelParams) -> float:
    """Log marginal likelihood on standardized data; -inf if not factorizable."""
    try:
        chol, _ = _chol_with_jitter(kernel_matrix(params, xn), params.noise_variance)
    except np.linalg.LinAlgError:
        return -np.inf
    alpha = cho_solve((chol, True), ys)
    return float(-0.5 * ys @ alpha - np.sum(np.log(np.diag(chol))) - 0.5 * len(ys) * math.log(2.0 * math.pi))


def _lml_from_sqdiffs(sqdiffs: np.ndarray, ys: np.ndarray, params: KernelParams) -> float:
    """Same likelihood, but from the precomputed per-dimension squared
    differences (n*n, d) so the search avoids rebuilding distances."""
    rho = np.sqrt(sqdiffs @ (1.0 / (params.lengthscales ** 2))).reshape(len(ys), len(ys))
    k = params.signal_variance * (1.0 + _SQRT5 * rho + 5.0 / 3.0 * rho * rho) * np.exp(-_SQRT5 * rho)
    try:
        chol, _ = _chol_with_jitter(k, params.noise_variance)
    except np.linalg.LinAlgError:
        return -np.inf
    alpha = cho_solve((chol, True), ys)
    return float(-0.5 * ys @ alpha - np.sum(np.log(np.diag(chol))) - 0.5 * len(ys) * math.log(2.0 * math.pi))


def _search_hyperparams(xn: np.ndarray, ys: np.ndarray, init: KernelParams,
                        rng: np.random.Generator, optimize_noise: bool) -> KernelParams:
    """Multi-start compass search on log-parameters.

    The 16 starts (the initial parameters plus 15 log-uniform draws) are
    ranked by likelihood and the search descends from the winner, so the
    result can never be worse than the initial parameters.
    """
    d = xn.shape[1]
    lo = np.log(np.concatenate([[SIGNAL_BOUNDS[0]], np.full(d, LENGTHSCALE_BOUNDS[0])]))
    hi = np.log(np.concatenate([[SIGNAL_BOUNDS[1]], np.full(d, LENGTHSCALE_BOUNDS[1])]))
    theta0 = np.log(np.concatenate([[init.signal_variance], init.lengthscales]))
    if optimize_noise:
        lo = np.append(lo, np.log(NOISE_FLOOR))
        hi = np.append(hi, 0.0)
        theta0 = np.append(theta0, np.log(init.noise_variance))

    def unpack(theta: np.ndarray) -> KernelParams:
        # exp(log(bound)) can land a hair outside the bound; clip it back
        sig = float(np.clip(math.exp(theta[0]), *SIGNAL_BOUNDS))
        ls = np.clip(np.exp(theta[1:d + 1]), *LENGTHSCALE_BOUNDS)
        noise = max(math.exp(theta[d + 1]), NOISE_FLOOR) if optimize_noise else init.noise_variance
        return KernelParams(sig, ls, noise)

    n = xn.shape[0]
    sqdiffs = ((xn[:, None, :] - xn[None, :, :]) ** 2).reshape(n * n, d)

    def objective(theta: np.ndarray) -> float:
        return _lml_from_sqdiffs(sqdiffs, ys, unpack(theta))

    starts = [np.clip(theta0, lo, hi)]
    starts += [rng.uniform(lo, hi) for _ in range(_N_STARTS - 1)]
    scores = [objective(t) for t in starts]
    best = starts[int(np.argmax(scores))]
    best_val = max(scores)

    step = 0.5
    min_gain = 1e-2  # nats; gains below this are not worth more evaluations
    for _ in range(15):  # hard cap; typical searches end well before
        if step < 0.05:
            break
        sweep_start = best_val
        for i in range(len(best)):
            for sign in (1.0, -1.0):
                cand = best.copy()
                cand[i] = np.clip(cand[i] + sign * step, lo[i], hi[i])
                if cand[i] == best[i]:
                    continue
                val = objective(cand)
                if val > best_val:
                    best, best_val = cand, val
        if best_val - sweep_start < min_gain:
            step *= 0.5
    return unpack(best)


def fit(x: np.ndarray, y: np.ndarray, bounds=None, optimize_hyperparams: bool = True,
        seed: int = 0, init_params: KernelParams | None = None,
        optimize_noise: bool = False) -> GpModel:
    """Fit the GP to observations.

    Parameters
    ----------
    x, y : training inputs (n x d) and outputs (n,)
    bounds : per-dimension (lo, hi) used to normalize inputs; unit cube if None
    optimize_hyperparams : run the seeded likelihood search; otherwise keep
        ``init_params`` (or defaults) as given
    seed : makes the hyperparameter search deterministic
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n, d = x.shape
    if n < 1:
        raise ValueError("need at least one observation")
    if len(y) != n:
        raise ValueError(f"x has {n} rows but y has {len(y)} values")

    if bounds is None:
        lo, hi = np.zeros(d), np.ones(d)
    else:
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
    xn = (x - lo) / (hi - lo)

    if n > 1:
        gaps = cdist(xn, xn, "chebyshev")
        gaps[np.diag_indices(n)] = np.inf
        if gaps.min() < DUPLICATE_TOL:
            i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
            raise ValueError(f"duplicate training rows {i} and {j} (within {DUPLICATE_TOL:g})")

    y_shift = float(np.mean(y))
    y_scale = float(np.std(y))
    if not (y_scale > 1e-12):
        y_scale = 1.0
    ys = (y - y_shift) / y_scale

    if init_params is None:
        init_params = KernelParams(lengthscales=np.full(d, 0.5))
    params = init_params
    if optimize_hyperparams:
        rng = np.random.default_rng(seed)
        params = _search_hyperparams(xn, ys, init_params, rng, optimize_noise)

    chol, jitter = _chol_with_jitter(kernel_matrix(params, xn), params.noise_variance)
    alpha = cho_solve((chol, True), ys)
    return GpModel(xn, ys, y_shift, y_scale, params, chol, alpha, lo, hi, jitter)


def posterior(model: GpModel, x):
    """Posterior (mean, std) in physical output units.

    Accepts a single point (shape (d,)) returning floats, or a batch (m x d)
    returning arrays.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xq = model.normalize(np.atleast_2d(x))
    k_star = kernel_matrix(model.params, model.x_train, xq)      # n x m
    mean_std = k_star.T @ model.alpha
    v = solve_triangular(model.chol, k_star, lower=True)
    var = np.maximum(model.params.signal_variance - np.sum(v * v, axis=0), 0.0)
    mean = model.y_shift + model.y_scale * mean_std
    std = model.y_scale * np.sqrt(var)
    if single:
        return float(mean[0]), float(std[0])
    return mean, std


def log_marginal_likelihood(model: GpModel) -> float:
    """Evidence of the fitted model on its standardized training data."""
    n = len(model.y_train)
    return float(-0.5 * model.y_train @ model.alpha
                 - np.sum(np.log(np.diag(model.chol)))
                 - 0.5 * n * math.log(2.0 * math.pi))
