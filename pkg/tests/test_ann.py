import math

import numpy as np
import pytest

from docsurrogate.dataset import TrainingSet, standardize
from docsurrogate.surrogates.ann import AnnModel, ann_fit, ann_predict


def test_learns_linear_target():
    x = np.linspace(-3, 3, 40)[:, None]
    ts = TrainingSet(x, 2.0 * x.ravel() + 1.0)
    m = ann_fit(ts, hidden=3, seed=0, max_epochs=200)
    st = standardize(ts)
    rmse = math.sqrt(np.mean((m.predict_standardized(st.X) - st.y) ** 2))
    assert rmse < 0.05


def test_accepted_steps_never_increase_sse(rng):
    X = rng.normal(size=(80, 3))
    ts = TrainingSet(X, np.sin(X[:, 0]) * X[:, 1] + rng.normal(0, 0.1, 80))
    m = ann_fit(ts, seed=1, max_epochs=60)
    h = np.array(m.sse_history)
    assert len(h) > 1
    assert np.all(np.diff(h) <= 0)


def test_same_seed_same_weights(rng):
    X = rng.normal(size=(60, 3))
    ts = TrainingSet(X, X @ [1.0, -2.0, 0.5])
    a = ann_fit(ts, seed=7, max_epochs=20)
    b = ann_fit(ts, seed=7, max_epochs=20)
    for name in ("W1", "b1", "w2"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    assert a.b2 == b.b2
    c = ann_fit(ts, seed=8, max_epochs=20)
    assert not np.array_equal(a.W1, c.W1)


def test_warns_when_underdetermined(rng):
    ts = TrainingSet(rng.normal(size=(10, 3)), rng.normal(size=10))
    with pytest.warns(RuntimeWarning, match="weights"):
        ann_fit(ts, hidden=10, max_epochs=2)


def _net(W1, b1, w2, b2):
    W1 = np.atleast_2d(np.asarray(W1, float))
    return AnnModel(W1, np.asarray(b1, float), np.asarray(w2, float), float(b2),
                    np.zeros(W1.shape[1]), np.ones(W1.shape[1]))


def test_zero_weights_output_bias():
    m = _net(np.zeros((4, 3)), np.zeros(4), np.zeros(4), 0.75)
    np.testing.assert_array_equal(ann_predict(m, np.random.default_rng(0).normal(size=(6, 3))), 0.75)


def test_hand_forward_pass():
    m = _net([[0.5]], [0.1], [2.0], -0.2)
    x = 0.8
    assert ann_predict(m, [[x]])[0] == pytest.approx(2.0 * math.tanh(0.5 * x + 0.1) - 0.2, abs=1e-15)


def test_prediction_deterministic(rng):
    ts = TrainingSet(rng.normal(size=(60, 3)), rng.normal(size=60))
    m = ann_fit(ts, seed=0, max_epochs=10)
    q = rng.normal(size=(9, 3))
    assert np.array_equal(m.predict(q), m.predict(q))
