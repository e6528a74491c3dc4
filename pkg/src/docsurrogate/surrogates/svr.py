"""Epsilon-support-vector regression trained by sequential minimal optimization.

The dual is written over 2n variables ``a = [alpha, alpha*]`` with signs
``s = [+1]*n + [-1]*n``::

    min  1/2 a'Qa + p'a   s.t.  s'a = 0,  0 <= a <= C
    Q_tu = s_t s_u K(x_t, x_u),   p = [eps - y, eps + y]

and solved two variables at a time, picking the maximal-violating pair with
second-order working-set selection.  The regression coefficients are
``beta = alpha - alpha*``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..dataset import TrainingSet, standardize
from ..errors import ConvergenceError

__all__ = [
    "SvrModel",
    "SmoResult",
    "rbf_kernel",
    "smo_solve",
    "dual_objective",
    "svr_fit",
    "svr_predict",
    "cv_rmse",
    "AUTO_BOUNDS",
]

log = logging.getLogger(__name__)

KKT_TOL = 1e-3
TAU = 1e-12
# (C, epsilon, gamma), searched on a log scale
AUTO_BOUNDS = ((1e-2, 1e3), (1e-3, 5.0), (1e-3, 1e2))
AUTO_BUDGET = 30
CV_FOLDS = 5


def rbf_kernel(A, B, gamma):
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    d = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(d, 0.0))


def dual_objective(beta, K, y, epsilon):
    """``1/2 b'Kb - y'b + eps*|b|_1`` -- the dual at ``alpha*alpha* = 0``."""
    beta = np.asarray(beta, dtype=float)
    return 0.5 * beta @ K @ beta - y @ beta + epsilon * np.abs(beta).sum()


@dataclass
class SmoResult:
    beta: np.ndarray
    bias: float
    violation: float
    iterations: int
    objective: float


def smo_solve(K, y, C, epsilon, tol=KKT_TOL, max_iter=1_000_000) -> SmoResult:
    """Solve the epsilon-SVR dual for a precomputed kernel matrix ``K``.

    Raises :class:`ConvergenceError` if the maximal KKT violation is still
    above ``tol`` after ``max_iter`` pair updates.
    """
    K = np.ascontiguousarray(K, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n = y.shape[0]
    s = np.concatenate([np.ones(n), -np.ones(n)])
    a = np.zeros(2 * n)
    G = np.concatenate([epsilon - y, epsilon + y])
    it, violation = _smo_loop(K, s, a, G, float(C), float(tol), int(max_iter))
    if violation >= tol:
        raise ConvergenceError(
            f"SMO did not reach KKT tolerance {tol:g} in {max_iter} iterations "
            f"(violation {violation:.3g})",
            violation=violation,
        )
    beta = a[:n] - a[n:]
    return SmoResult(
        beta=beta,
        bias=_bias(a, s, G, C),
        violation=float(violation),
        iterations=int(it),
        objective=float(dual_objective(beta, K, y, epsilon)),
    )


@njit(cache=True)
def _smo_loop(K, s, a, G, C, tol, max_iter):
    """Pair updates in place on ``a`` and ``G``; returns (iterations, final violation)."""
    n2 = a.shape[0]
    n = n2 // 2
    it = 0
    while True:
        # maximal violating pair, first-order part: i from the "up" set
        i = -1
        m = -np.inf
        M = np.inf
        for t in range(n2):
            sc = -s[t] * G[t]
            if (s[t] > 0 and a[t] < C) or (s[t] < 0 and a[t] > 0):
                if sc > m:
                    m = sc
                    i = t
            if (s[t] > 0 and a[t] > 0) or (s[t] < 0 and a[t] < C):
                if sc < M:
                    M = sc
        violation = m - M
        if violation < tol or it >= max_iter:
            return it, violation

        # second-order choice of j among violating "low" members
        ii = i % n
        j = -1
        best = np.inf
        for t in range(n2):
            if (s[t] > 0 and a[t] > 0) or (s[t] < 0 and a[t] < C):
                b = m + s[t] * G[t]
                if b > 0:
                    tt = t % n
                    q = K[ii, ii] + K[tt, tt] - 2.0 * K[ii, tt]
                    if q <= 0:
                        q = TAU
                    g = -(b * b) / q
                    if g < best:
                        best = g
                        j = t
        jj = j % n

        Qij = s[i] * s[j] * K[ii, jj]
        ai_old = a[i]
        aj_old = a[j]
        if s[i] != s[j]:
            qc = K[ii, ii] + K[jj, jj] + 2.0 * Qij
            if qc <= 0:
                qc = TAU
            delta = (-G[i] - G[j]) / qc
            diff = a[i] - a[j]
            a[i] += delta
            a[j] += delta
            if diff > 0:
                if a[j] < 0:
                    a[j] = 0.0
                    a[i] = diff
            elif a[i] < 0:
                a[i] = 0.0
                a[j] = -diff
            if diff > 0:
                if a[i] > C:
                    a[i] = C
                    a[j] = C - diff
            elif a[j] > C:
                a[j] = C
                a[i] = C + diff
        else:
            qc = K[ii, ii] + K[jj, jj] - 2.0 * Qij
            if qc <= 0:
                qc = TAU
            delta = (G[i] - G[j]) / qc
            total = a[i] + a[j]
            a[i] -= delta
            a[j] += delta
            if total > C:
                if a[i] > C:
                    a[i] = C
                    a[j] = total - C
            elif a[j] < 0:
                a[j] = 0.0
                a[i] = total
            if total > C:
                if a[j] > C:
                    a[j] = C
                    a[i] = total - C
            elif a[i] < 0:
                a[i] = 0.0
                a[j] = total

        di = (a[i] - ai_old) * s[i]
        dj = (a[j] - aj_old) * s[j]
        for t in range(n2):
            tt = t % n
            G[t] += s[t] * (di * K[ii, tt] + dj * K[jj, tt])
        it += 1


def _bias(a, s, G, C):
    sG = s * G
    at_upper = a >= C
    at_lower = a <= 0
    free = ~at_upper & ~at_lower
    if free.any():
        rho = sG[free].mean()
    else:
        ub_mask = (at_upper & (s < 0)) | (at_lower & (s > 0))
        lb_mask = (at_upper & (s > 0)) | (at_lower & (s < 0))
        ub = sG[ub_mask].min() if ub_mask.any() else np.inf
        lb = sG[lb_mask].max() if lb_mask.any() else -np.inf
        rho = (ub + lb) / 2.0
    return float(-rho)


@dataclass(frozen=True, eq=False)
class SvrModel:
    support_vectors: np.ndarray  # standardized inputs
    dual_coef: np.ndarray  # alpha - alpha*, each in [-C, C]
    bias: float
    gamma: float
    C: float
    epsilon: float
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float = 0.0
    y_std: float = 1.0

    kind = "svr"

    def predict_standardized(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if self.dual_coef.size == 0:
            return np.full(Z.shape[0], self.bias)
        return rbf_kernel(Z, self.support_vectors, self.gamma) @ self.dual_coef + self.bias

    def predict(self, X):
        Z = (np.atleast_2d(np.asarray(X, dtype=float)) - self.x_mean) / self.x_std
        return self.predict_standardized(Z) * self.y_std + self.y_mean


def _fit_standardized(X, y, C, epsilon, gamma, max_iter):
    res = smo_solve(rbf_kernel(X, X, gamma), y, C, epsilon, max_iter=max_iter)
    keep = res.beta != 0
    return res, X[keep], res.beta[keep]


def cv_rmse(X, y, C, epsilon, gamma, folds=CV_FOLDS, seed=0, max_iter=1_000_000):
    """K-fold cross-validated RMSE on standardized arrays."""
    n = X.shape[0]
    k = min(folds, n)
    order = np.random.default_rng(seed).permutation(n)
    sq = 0.0
    for f in range(k):
        test = order[f::k]
        train = np.setdiff1d(order, test)
        if train.size == 0:
            continue
        res, sv, coef = _fit_standardized(X[train], y[train], C, epsilon, gamma, max_iter)
        pred = (rbf_kernel(X[test], sv, gamma) @ coef if coef.size else 0.0) + res.bias
        sq += float(((pred - y[test]) ** 2).sum())
    return float(np.sqrt(sq / n))


def _auto_hyper(X, y, budget, seed, max_iter):
    from ..bayesopt import BoProblem, optimize

    lo = np.log10([b[0] for b in AUTO_BOUNDS])
    hi = np.log10([b[1] for b in AUTO_BOUNDS])

    def objective(point):
        C, eps, gamma = 10.0 ** np.asarray(point)
        try:
            return -cv_rmse(X, y, C, eps, gamma, seed=seed, max_iter=max_iter)
        except ConvergenceError:
            return -np.inf

    state = optimize(objective, BoProblem(lo, hi), budget=budget, seed=seed)
    C, eps, gamma = 10.0 ** state.best_point
    log.info("svr auto: C=%.4g eps=%.4g gamma=%.4g cv_rmse=%.4g", C, eps, gamma, -state.best_value)
    return C, eps, gamma


def svr_fit(ts: TrainingSet, hyper="auto", budget=AUTO_BUDGET, seed=0, max_iter=1_000_000) -> SvrModel:
    """Fit an epsilon-SVR with an RBF kernel on standardized data.

    ``hyper`` is ``(C, epsilon, gamma)`` or ``"auto"``, in which case the
    three are chosen by Bayesian optimization of 5-fold CV RMSE using
    ``budget`` evaluations.
    """
    st = standardize(ts)
    if st.n < 2:
        raise ValueError("SVR fit needs at least two training points")
    if isinstance(hyper, str):
        if hyper != "auto":
            raise ValueError(f"unknown hyperparameter mode {hyper!r}")
        C, epsilon, gamma = _auto_hyper(st.X, st.y, budget, seed, max_iter)
    else:
        C, epsilon, gamma = (float(v) for v in hyper)
    res, sv, coef = _fit_standardized(st.X, st.y, C, epsilon, gamma, max_iter)
    return SvrModel(
        support_vectors=sv, dual_coef=coef, bias=res.bias,
        gamma=float(gamma), C=float(C), epsilon=float(epsilon),
        x_mean=st.x_mean, x_std=st.x_std, y_mean=st.y_mean, y_std=st.y_std,
    )


def svr_predict(m: SvrModel, x):
    return m.predict(x)
