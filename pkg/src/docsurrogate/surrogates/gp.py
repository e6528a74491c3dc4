"""Gaussian-process regression with a squared-exponential kernel.

Hyperparameters (lengthscale, signal variance, noise variance) are fitted by
maximizing the log marginal likelihood with multi-start L-BFGS-B in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from ..dataset import TrainingSet, standardize
from ..errors import ConditioningError

__all__ = [
    "GpModel",
    "LOG_BOUNDS",
    "sq_exp_kernel",
    "log_marginal_likelihood",
    "fit_gp_arrays",
    "gp_fit",
    "gp_predict",
]

# natural-log bounds for (lengthscale, signal variance, noise variance)
LOG_BOUNDS = ((-3.0, 3.0), (-3.0, 3.0), (-10.0, 1.0))
JITTER_START = 1e-10
JITTER_MAX = 1e-4


def _sqdist(A, B):
    d = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.maximum(d, 0.0)


def sq_exp_kernel(A, B, lengthscale, signal_var):
    return signal_var * np.exp(-_sqdist(A, B) / (2.0 * lengthscale**2))


def _cholesky_with_jitter(K, noise_var):
    """Cholesky of K + (noise_var + jitter) I, escalating jitter x10 on failure."""
    n = K.shape[0]
    jitter = JITTER_START
    while jitter <= JITTER_MAX * (1 + 1e-12):
        try:
            L = cholesky(K + (noise_var + jitter) * np.eye(n), lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise ConditioningError(
        f"kernel matrix not positive definite even with jitter {JITTER_MAX:g}"
    )


def log_marginal_likelihood(X, y, log_params, return_grad=False):
    """Log marginal likelihood at ``log_params = (log l, log sf2, log sn2)``.

    With ``return_grad`` also returns the gradient w.r.t. the log parameters.
    """
    ell, sf2, sn2 = np.exp(np.asarray(log_params, dtype=float))
    n = X.shape[0]
    D2 = _sqdist(X, X)
    K = sf2 * np.exp(-D2 / (2.0 * ell**2))
    L, jitter = _cholesky_with_jitter(K, sn2)
    alpha = cho_solve((L, True), y)
    lml = -0.5 * y @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * math.log(2 * math.pi)
    if not return_grad:
        return lml
    Kinv = cho_solve((L, True), np.eye(n))
    inner = np.outer(alpha, alpha) - Kinv
    dK_ell = K * D2 / ell**2
    grad = 0.5 * np.array(
        [
            np.sum(inner * dK_ell),
            np.sum(inner * K),
            sn2 * np.trace(inner),
        ]
    )
    return lml, grad


@dataclass(frozen=True, eq=False)
class GpModel:
    X: np.ndarray  # standardized training inputs
    y: np.ndarray  # standardized training targets
    lengthscale: float
    signal_var: float
    noise_var: float
    jitter: float
    alpha: np.ndarray
    chol: np.ndarray
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float = 0.0
    y_std: float = 1.0

    kind = "gp"

    @classmethod
    def build(cls, X, y, lengthscale, signal_var, noise_var, x_mean=None, x_std=None,
              y_mean=0.0, y_std=1.0):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        K = sq_exp_kernel(X, X, lengthscale, signal_var)
        L, jitter = _cholesky_with_jitter(K, noise_var)
        alpha = cho_solve((L, True), y)
        d = X.shape[1]
        return cls(
            X=X, y=y,
            lengthscale=float(lengthscale), signal_var=float(signal_var),
            noise_var=float(noise_var), jitter=jitter, alpha=alpha, chol=L,
            x_mean=np.zeros(d) if x_mean is None else np.asarray(x_mean, dtype=float),
            x_std=np.ones(d) if x_std is None else np.asarray(x_std, dtype=float),
            y_mean=float(y_mean), y_std=float(y_std),
        )

    def predict_standardized(self, Z, return_var=False):
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        Ks = sq_exp_kernel(Z, self.X, self.lengthscale, self.signal_var)
        mean = Ks @ self.alpha
        if not return_var:
            return mean
        v = solve_triangular(self.chol, Ks.T, lower=True)
        var = np.maximum(self.signal_var - (v * v).sum(0), 0.0)
        return mean, var

    def predict(self, X, return_var=False):
        """Posterior mean (percent) at raw inputs; optionally the latent variance (percent^2)."""
        Z = (np.atleast_2d(np.asarray(X, dtype=float)) - self.x_mean) / self.x_std
        out = self.predict_standardized(Z, return_var)
        if not return_var:
            return out * self.y_std + self.y_mean
        mean, var = out
        return mean * self.y_std + self.y_mean, var * self.y_std**2

    def log_marginal_likelihood(self):
        params = np.log([self.lengthscale, self.signal_var, self.noise_var])
        return log_marginal_likelihood(self.X, self.y, params)


def fit_gp_arrays(X, y, seed=0, restarts=10, fixed=None, bounds=LOG_BOUNDS):
    """Fit on already-scaled arrays; returns a :class:`GpModel` with identity stats.

    ``fixed = (lengthscale, signal_var, noise_var)`` skips the likelihood search.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] < 2:
        raise ValueError("GP fit needs at least two training points")
    if fixed is not None:
        return GpModel.build(X, y, *fixed)

    def objective(theta):
        try:
            lml, grad = log_marginal_likelihood(X, y, theta, return_grad=True)
        except ConditioningError:
            return 1e25, np.zeros_like(theta)
        return -lml, -grad

    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    starts = [np.clip(np.array([0.0, 0.0, -2.0]), lo, hi)]
    starts += [rng.uniform(lo, hi) for _ in range(restarts - 1)]
    best_theta, best_val = None, np.inf
    for theta0 in starts:
        res = minimize(objective, theta0, jac=True, method="L-BFGS-B", bounds=bounds)
        if np.isfinite(res.fun) and res.fun < best_val:
            best_theta, best_val = res.x, res.fun
    if best_theta is None:
        raise ConditioningError("no restart produced a positive-definite kernel")
    return GpModel.build(X, y, *np.exp(best_theta))


def gp_fit(ts: TrainingSet, seed=0, restarts=10, fixed=None) -> GpModel:
    """Standardize ``ts`` and fit a GP by maximum likelihood."""
    st = standardize(ts)
    m = fit_gp_arrays(st.X, st.y, seed=seed, restarts=restarts, fixed=fixed)
    return GpModel.build(
        m.X, m.y, m.lengthscale, m.signal_var, m.noise_var,
        st.x_mean, st.x_std, st.y_mean, st.y_std,
    )


def gp_predict(m: GpModel, x):
    """Return ``(mean, variance)`` in percent / percent^2."""
    return m.predict(x, return_var=True)
