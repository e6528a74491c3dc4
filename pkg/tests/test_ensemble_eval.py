import json
import math

import numpy as np
import pytest

from docsurrogate.dataset import TrainingSet
from docsurrogate.errors import ModelFormatError, RrseUndefinedError
from docsurrogate.surrogates import (
    MODEL_TYPES,
    EnsembleModel,
    ensemble_predict,
    evaluate,
    fit_model,
    load_model,
    save_model,
)
from docsurrogate.surrogates.persistence import from_dict, to_dict


class Const:
    def __init__(self, v):
        self.v = v

    def predict(self, X):
        return np.full(np.atleast_2d(X).shape[0], float(self.v))


class Affine:
    def __init__(self, w, b):
        self.w, self.b = np.asarray(w, float), b

    def predict(self, X):
        return np.atleast_2d(X) @ self.w + self.b


def test_ensemble_is_plain_mean():
    e = EnsembleModel(Const(60), Const(70), Const(80))
    assert ensemble_predict(e, [[1.0, 2.0, 3.0]])[0] == pytest.approx(70.0, abs=1e-12)


def test_ensemble_mean_random(rng):
    members = [Affine(rng.normal(size=3), rng.normal()) for _ in range(3)]
    e = EnsembleModel(*members)
    X = rng.normal(size=(1000, 3))
    want = sum(m.predict(X) for m in members) / 3
    np.testing.assert_allclose(e.predict(X), want, atol=1e-12)


def test_evaluate_small_example():
    r = evaluate([1.0, 2.0], [0.0, 4.0])
    assert r.mae == pytest.approx(1.5, abs=1e-12)
    assert r.rmse == pytest.approx(math.sqrt(2.5), abs=1e-12)
    assert r.rrse == pytest.approx(math.sqrt(5 / 8), abs=1e-12)
    assert f"{r.rmse:.4f}" == "1.5811" and f"{r.rrse:.4f}" == "0.7906"


def test_mean_predictor_has_unit_rrse(rng):
    a = rng.uniform(0, 100, 50)
    assert evaluate(np.full(50, a.mean()), a).rrse == pytest.approx(1.0, abs=1e-12)


def test_perfect_predictor(rng):
    a = rng.uniform(0, 100, 20)
    r = evaluate(a, a)
    assert (r.rrse, r.mae, r.rmse) == (0.0, 0.0, 0.0)


def test_constant_actuals_raise():
    with pytest.raises(RrseUndefinedError) as err:
        evaluate([1.0, 3.0], [2.0, 2.0])
    assert err.value.mae == pytest.approx(1.0)
    assert err.value.rmse == pytest.approx(1.0)


def test_evaluate_length_mismatch():
    with pytest.raises(ValueError):
        evaluate([1.0, 2.0], [1.0, 2.0, 3.0])


@pytest.fixture(scope="module")
def small_set():
    rng = np.random.default_rng(5)
    X = rng.uniform(-2, 2, size=(60, 3))
    y = 50 + 10 * np.tanh(X[:, 0]) + 4 * X[:, 1] * X[:, 2] + rng.normal(0, 0.5, 60)
    return TrainingSet(X, y)


_FAST = {"svr": {"budget": 6}, "ensemble": {"svr_budget": 6, "max_epochs": 20}, "ann": {"max_epochs": 20}}


@pytest.mark.parametrize("kind", MODEL_TYPES)
def test_round_trip(kind, small_set, tmp_path, rng):
    model = fit_model(kind, small_set, seed=0, **_FAST.get(kind, {}))
    path = tmp_path / f"{kind}.json"
    save_model(model, path)
    loaded = load_model(path)
    q = rng.uniform(-3, 3, size=(100, 3))
    np.testing.assert_allclose(loaded.predict(q), model.predict(q), atol=1e-10, rtol=0)
    doc = json.loads(path.read_text())
    assert doc["format"] == "docsurrogate-model" and doc["type"] == kind


def test_version_mismatch(small_set):
    doc = to_dict(fit_model("gp", small_set, seed=0))
    doc["version"] = 99
    with pytest.raises(ModelFormatError, match="version"):
        from_dict(doc)


def test_wrong_format_rejected(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"format": "something-else", "version": 1}')
    with pytest.raises(ModelFormatError):
        load_model(p)
    p.write_text("not json")
    with pytest.raises(ModelFormatError):
        load_model(p)
