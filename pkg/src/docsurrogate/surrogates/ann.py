"""One-hidden-layer tanh network trained with Levenberg-Marquardt."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..dataset import TrainingSet, standardize
from ..errors import ConvergenceError

__all__ = ["AnnModel", "ann_fit", "ann_predict", "DEFAULT_HIDDEN"]

DEFAULT_HIDDEN = 10
DEFAULT_EPOCHS = 100
LAMBDA_INIT = 1e-3
LAMBDA_MAX = 1e10
MIN_GRAD = 1e-6


@dataclass(frozen=True, eq=False)
class AnnModel:
    W1: np.ndarray  # (H, T)
    b1: np.ndarray  # (H,)
    w2: np.ndarray  # (H,)
    b2: float
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float = 0.0
    y_std: float = 1.0
    sse_history: tuple = field(default=(), repr=False)

    kind = "ann"

    @property
    def layer_sizes(self):
        return (self.W1.shape[1], self.W1.shape[0], 1)

    def predict_standardized(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        return np.tanh(Z @ self.W1.T + self.b1) @ self.w2 + self.b2

    def predict(self, X):
        Z = (np.atleast_2d(np.asarray(X, dtype=float)) - self.x_mean) / self.x_std
        return self.predict_standardized(Z) * self.y_std + self.y_mean


def _unpack(theta, T, H):
    W1 = theta[: H * T].reshape(H, T)
    b1 = theta[H * T : H * T + H]
    w2 = theta[H * T + H : H * T + 2 * H]
    return W1, b1, w2, theta[-1]


def _residuals_and_jacobian(theta, X, y, H):
    n, T = X.shape
    W1, b1, w2, b2 = _unpack(theta, T, H)
    h = np.tanh(X @ W1.T + b1)
    r = h @ w2 + b2 - y
    dh = (1.0 - h * h) * w2  # d out / d hidden pre-activation, (n, H)
    J = np.empty((n, theta.size))
    J[:, : H * T] = (dh[:, :, None] * X[:, None, :]).reshape(n, H * T)
    J[:, H * T : H * T + H] = dh
    J[:, H * T + H : H * T + 2 * H] = h
    J[:, -1] = 1.0
    return r, J


def _sse(theta, X, y, H):
    W1, b1, w2, b2 = _unpack(theta, X.shape[1], H)
    r = np.tanh(X @ W1.T + b1) @ w2 + b2 - y
    return float(r @ r)


def ann_fit(ts: TrainingSet, hidden=DEFAULT_HIDDEN, seed=0, max_epochs=DEFAULT_EPOCHS) -> AnnModel:
    """Train on the standardized table.

    Damping starts at 1e-3 and moves x0.1 on an accepted step, x10 on a
    rejected one.  Training stops after ``max_epochs`` accepted steps, when
    the gradient norm drops below 1e-6, or when damping exceeds 1e10.
    """
    st = standardize(ts)
    X, y = st.X, st.y
    n, T = X.shape
    H = int(hidden)
    n_weights = H * T + 2 * H + 1
    if n <= n_weights:
        warnings.warn(
            f"ANN has {n_weights} weights but only {n} training rows", RuntimeWarning, stacklevel=2
        )
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-0.5, 0.5, size=n_weights)

    lam = LAMBDA_INIT
    r, J = _residuals_and_jacobian(theta, X, y, H)
    sse = float(r @ r)
    if not np.isfinite(sse):
        raise ConvergenceError("ANN loss is not finite at initialization")
    history = [sse]
    eye = np.eye(n_weights)
    for _ in range(max_epochs):
        grad = J.T @ r
        if np.linalg.norm(grad) < MIN_GRAD:
            break
        JtJ = J.T @ J
        accepted = False
        while lam <= LAMBDA_MAX:
            try:
                step = np.linalg.solve(JtJ + lam * eye, -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = theta + step
            trial_sse = _sse(trial, X, y, H)
            if not np.isfinite(trial_sse):
                raise ConvergenceError("ANN loss diverged (non-finite SSE)")
            if trial_sse < sse:
                theta, sse = trial, trial_sse
                lam /= 10.0
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            break
        history.append(sse)
        r, J = _residuals_and_jacobian(theta, X, y, H)

    W1, b1, w2, b2 = _unpack(theta, T, H)
    return AnnModel(
        W1=W1.copy(), b1=b1.copy(), w2=w2.copy(), b2=float(b2),
        x_mean=st.x_mean, x_std=st.x_std, y_mean=st.y_mean, y_std=st.y_std,
        sse_history=tuple(history),
    )


def ann_predict(m: AnnModel, x):
    return m.predict(x)
