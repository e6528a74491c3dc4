"""Box-bounded Bayesian optimization with a GP model and expected improvement.

Used both to tune SVR hyperparameters and to search binarization parameters.
Everything is maximization, and every random draw derives from the
optimizer seed, so a run is reproducible point for point.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from .errors import ConditioningError
from .surrogates.gp import fit_gp_arrays

__all__ = [
    "BoProblem",
    "BoState",
    "expected_improvement",
    "suggest_next",
    "optimize",
    "write_trace_csv",
    "N_CANDIDATES",
]

N_CANDIDATES = 256
N_REFINE = 5
GP_RESTARTS = 3


@dataclass(frozen=True)
class BoProblem:
    """Box domain.  ``integer[i]`` marks a dimension rounded before evaluation."""

    lower: tuple
    upper: tuple
    integer: tuple = None
    names: tuple = None

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi) or not lo:
            raise ValueError("lower and upper bounds must be non-empty and of equal length")
        if not all(math.isfinite(a) and math.isfinite(b) and a < b for a, b in zip(lo, hi)):
            raise ValueError("every dimension needs finite bounds with lower < upper")
        integer = tuple(bool(v) for v in (self.integer or (False,) * len(lo)))
        names = tuple(self.names or (f"x{i}" for i in range(len(lo))))
        if len(integer) != len(lo) or len(names) != len(lo):
            raise ValueError("integer flags and names must match the dimension")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "integer", integer)
        object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def from_unit(self, u) -> np.ndarray:
        lo, hi = np.array(self.lower), np.array(self.upper)
        return np.clip(lo + np.asarray(u, dtype=float) * (hi - lo), lo, hi)

    def to_unit(self, x) -> np.ndarray:
        lo, hi = np.array(self.lower), np.array(self.upper)
        return (np.asarray(x, dtype=float) - lo) / (hi - lo)

    def snap(self, x) -> np.ndarray:
        """Round integer dimensions, staying inside the bounds."""
        x = np.array(x, dtype=float)
        for i, is_int in enumerate(self.integer):
            if is_int:
                lo, hi = math.ceil(self.lower[i]), math.floor(self.upper[i])
                x[i] = min(max(round(x[i]), lo), hi)
        return x


@dataclass
class BoState:
    seed: int
    points: list = field(default_factory=list)
    values: list = field(default_factory=list)
    incumbent_history: list = field(default_factory=list)

    @property
    def iteration(self) -> int:
        return len(self.values)

    @property
    def best_index(self) -> int:
        # first index wins ties
        return int(np.argmax(self.values)) if self.values else -1

    @property
    def best_value(self) -> float:
        return self.values[self.best_index] if self.values else -math.inf

    @property
    def best_point(self) -> np.ndarray:
        return np.array(self.points[self.best_index]) if self.points else None

    def record(self, point, value):
        value = float(value)
        if not math.isfinite(value):
            value = -math.inf
        self.points.append(np.asarray(point, dtype=float).copy())
        self.values.append(value)
        self.incumbent_history.append(self.best_value)


def expected_improvement(mean, sd, incumbent_value):
    """EI for maximization; ``max(mean - f*, 0)`` where ``sd == 0``."""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    gap = mean - incumbent_value
    safe = np.where(sd > 0, sd, 1.0)
    # tiny sd sends z to +-inf; pdf underflows to 0 which is the right limit
    with np.errstate(over="ignore", divide="ignore"):
        z = gap / safe
        ei = gap * norm.cdf(z) + safe * norm.pdf(z)
    ei = np.where(sd > 0, ei, np.maximum(gap, 0.0))
    ei = np.maximum(ei, 0.0)
    return ei if ei.ndim else float(ei)


def _rng(state: BoState):
    return np.random.default_rng([state.seed, state.iteration])


def _fit_posterior(state, problem):
    """GP on finite observations in unit-cube coordinates; returns (model, best standardized value)."""
    vals = np.array(state.values)
    ok = np.isfinite(vals)
    U = problem.to_unit(np.array(state.points)[ok])
    y = vals[ok]
    mu, sd = y.mean(), y.std()
    if not sd > 0:
        sd = 1.0
    z = (y - mu) / sd
    gp = fit_gp_arrays(U, z, seed=int(_rng(state).integers(2**31)), restarts=GP_RESTARTS)
    return gp, z.max()


def suggest_next(state: BoState, problem: BoProblem) -> np.ndarray:
    """Next point to evaluate: the approximate maximizer of expected improvement."""
    rng = _rng(state)
    d = problem.dim
    n_ok = int(np.isfinite(state.values).sum()) if state.values else 0
    if n_ok < d + 1:
        u = qmc.Sobol(d, scramble=True, seed=rng).random(1)[0]
        return problem.from_unit(u)
    try:
        gp, f_best = _fit_posterior(state, problem)
    except ConditioningError:
        return problem.from_unit(rng.random(d))

    def ei(U):
        mean, var = gp.predict_standardized(np.atleast_2d(U), return_var=True)
        return expected_improvement(mean, np.sqrt(var), f_best)

    cand = qmc.Sobol(d, scramble=True, seed=rng).random(N_CANDIDATES)
    cand_ei = ei(cand)
    order = np.argsort(-cand_ei, kind="stable")
    best_u, best_ei = cand[order[0]], cand_ei[order[0]]
    for k in order[:N_REFINE]:
        res = minimize(
            lambda u: -float(ei(u)[0]), cand[k], method="L-BFGS-B", bounds=[(0.0, 1.0)] * d
        )
        u = np.clip(res.x, 0.0, 1.0)
        val = float(ei(u)[0])
        if val > best_ei:
            best_u, best_ei = u, val
    return problem.from_unit(best_u)


def optimize(objective, problem: BoProblem, budget: int, seed: int = 0, callback=None) -> BoState:
    """Maximize ``objective`` with exactly ``budget`` evaluations.

    The first ``max(5, d + 1)`` points come from a seeded Latin hypercube.
    Non-finite objective values are recorded as ``-inf`` and left out of the
    GP fit.  ``callback(state)`` runs after every evaluation.
    """
    if budget < 5:
        raise ValueError(f"budget must be at least 5, got {budget}")
    state = BoState(seed=int(seed))
    n_init = min(budget, max(5, problem.dim + 1))
    design = qmc.LatinHypercube(problem.dim, seed=np.random.default_rng([int(seed), 2**31])).random(n_init)

    def evaluate(x):
        x = problem.snap(x)
        state.record(x, objective(x))
        if callback is not None:
            callback(state)

    for u in design:
        evaluate(problem.from_unit(u))
    while state.iteration < budget:
        evaluate(suggest_next(state, problem))
    return state


def write_trace_csv(state: BoState, problem: BoProblem, path, extra=None) -> None:
    """CSV ``iteration,<names...>,value,incumbent_value``.

    ``extra`` is an optional ``(header, rows)`` pair appended column-wise.
    """
    header = ["iteration", *problem.names, "value", "incumbent_value"]
    if extra is not None:
        header += list(extra[0])
    with open(os.fspath(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, (p, v, inc) in enumerate(zip(state.points, state.values, state.incumbent_history)):
            row = [i, *(repr(float(c)) for c in p), repr(v), repr(inc)]
            if extra is not None:
                row += list(extra[1][i])
            w.writerow(row)
