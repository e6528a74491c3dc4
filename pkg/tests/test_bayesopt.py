import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from docsurrogate.bayesopt import (
    N_CANDIDATES,
    BoProblem,
    BoState,
    expected_improvement,
    optimize,
    suggest_next,
    write_trace_csv,
)


def test_ei_zero_sd():
    assert expected_improvement(3.0, 0.0, 1.0) == 2.0
    assert expected_improvement(0.5, 0.0, 1.0) == 0.0


def test_ei_at_incumbent():
    assert expected_improvement(1.0, 1.0, 1.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-12)


@pytest.mark.parametrize("mean,sd,best", [(0.3, 0.7, 0.5), (2.0, 1.5, 0.0), (-1.0, 0.4, 0.2)])
def test_ei_monte_carlo(mean, sd, best):
    draws = np.random.default_rng(0).normal(mean, sd, 1_000_000)
    mc = np.mean(np.maximum(draws - best, 0.0))
    assert expected_improvement(mean, sd, best) == pytest.approx(mc, abs=1e-2)


@given(st.floats(-5, 5), st.floats(0, 5), st.floats(-5, 5))
def test_ei_nonnegative(mean, sd, best):
    assert expected_improvement(mean, sd, best) >= 0.0


def _state_with(problem, fn, n, seed=0):
    state = BoState(seed=seed)
    rng = np.random.default_rng(seed)
    for _ in range(n):
        x = problem.from_unit(rng.random(problem.dim))
        state.record(x, fn(x))
    return state


def test_suggestion_in_bounds_and_deterministic():
    prob = BoProblem((-2.0, 0.0), (3.0, 10.0))
    state = _state_with(prob, lambda x: -np.sum((x - 1) ** 2), 8)
    a = suggest_next(state, prob)
    b = suggest_next(state, prob)
    assert np.array_equal(a, b)
    assert np.all(a >= prob.lower) and np.all(a <= prob.upper)


def test_suggestion_beats_candidates():
    from scipy.stats import qmc

    from docsurrogate.bayesopt import _fit_posterior, _rng

    prob = BoProblem((0.0, 0.0), (1.0, 1.0))
    state = _state_with(prob, lambda x: math.sin(5 * x[0]) * math.cos(3 * x[1]), 10)
    x = suggest_next(state, prob)
    gp, f_best = _fit_posterior(state, prob)
    cand = qmc.Sobol(2, scramble=True, seed=_rng(state)).random(N_CANDIDATES)

    def ei(U):
        m, v = gp.predict_standardized(np.atleast_2d(U), return_var=True)
        return expected_improvement(m, np.sqrt(v), f_best)

    assert ei(prob.to_unit(x))[0] >= ei(cand).max() - 1e-12


@pytest.mark.parametrize("values", [[1.0] * 6, [0.0, 1e-12, 0.0, 1e-12, 0.0, 0.0]])
def test_degenerate_observations(values):
    prob = BoProblem((0.0,), (1.0,))
    state = BoState(seed=0)
    for i, v in enumerate(values):
        state.record([i / 10], v)
    x = suggest_next(state, prob)
    assert 0.0 <= x[0] <= 1.0


def test_one_dimensional_quadratic():
    state = optimize(lambda x: -(x[0] - 0.3) ** 2, BoProblem((0.0,), (1.0,)), budget=15, seed=0)
    assert abs(state.best_point[0] - 0.3) < 0.05


def branin_neg(x):
    a, b, c = 1.0, 5.1 / (4 * math.pi**2), 5 / math.pi
    r, s, t = 6.0, 10.0, 1 / (8 * math.pi)
    return -(a * (x[1] - b * x[0] ** 2 + c * x[0] - r) ** 2 + s * (1 - t) * math.cos(x[0]) + s)


def test_branin():
    optimum = -0.397887
    state = optimize(branin_neg, BoProblem((-5.0, 0.0), (10.0, 15.0)), budget=40, seed=1)
    assert abs(state.best_value - optimum) <= 0.05 * abs(optimum) + 0.05


def test_budget_exact_and_monotone():
    calls = []

    def f(x):
        calls.append(x.copy())
        return float(np.sin(3 * x[0]))

    state = optimize(f, BoProblem((0.0,), (2.0,)), budget=5, seed=3)
    assert len(calls) == 5 == state.iteration
    state = optimize(f, BoProblem((0.0,), (2.0,)), budget=12, seed=3)
    assert np.all(np.diff(state.incumbent_history) >= 0)
    assert state.incumbent_history[-1] == max(state.values)


def test_budget_below_minimum():
    with pytest.raises(ValueError):
        optimize(lambda x: 0.0, BoProblem((0.0,), (1.0,)), budget=4)


def test_reproducible():
    prob = BoProblem((0.0, 0.0), (1.0, 1.0))
    f = lambda x: -float(np.sum((x - 0.7) ** 2))  # noqa: E731
    a = optimize(f, prob, budget=10, seed=9)
    b = optimize(f, prob, budget=10, seed=9)
    assert np.array_equal(np.array(a.points), np.array(b.points))


def test_non_finite_recorded_as_minus_inf():
    def f(x):
        return math.nan if x[0] > 0.5 else x[0]

    state = optimize(f, BoProblem((0.0,), (1.0,)), budget=10, seed=0)
    vals = np.array(state.values)
    assert np.all(np.isfinite(vals) | (vals == -math.inf))
    assert np.any(vals == -math.inf)
    assert state.best_value <= 0.5


def test_integer_dimensions_snapped():
    prob = BoProblem((0.5, 0.0), (7.5, 1.0), integer=(True, False))
    seen = []
    optimize(lambda x: seen.append(x[0]) or -abs(x[0] - 4) - x[1], prob, budget=8, seed=0)
    assert all(v == int(v) and 1 <= v <= 7 for v in seen)


def test_trace_csv(tmp_path):
    prob = BoProblem((0.0,), (1.0,), names=("u",))
    state = optimize(lambda x: x[0], prob, budget=6, seed=0)
    path = tmp_path / "trace.csv"
    write_trace_csv(state, prob, path)
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["iteration", "u", "value", "incumbent_value"]
    assert len(rows) == 6
    assert float(rows[-1]["incumbent_value"]) == state.best_value


def test_problem_validation():
    with pytest.raises(ValueError):
        BoProblem((1.0,), (0.0,))
    with pytest.raises(ValueError):
        BoProblem((0.0,), (math.inf,))
