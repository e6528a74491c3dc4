import csv

import numpy as np
import pytest

from docsurrogate.binarize import SauvolaParams, auto_binarize, sauvola
from docsurrogate.dataset import build_features, build_target
from docsurrogate.imaging import GrayImage
from docsurrogate.synthetic import make_document
from oracles import naive_sauvola


@pytest.mark.parametrize("window", [3, 5, 15])
@pytest.mark.parametrize("shape", [(1, 1), (4, 7), (23, 17), (64, 64)])
def test_matches_naive_oracle(window, shape, rng):
    levels = rng.integers(0, 256, size=shape, dtype=np.uint8)
    k = float(rng.uniform(0.01, 0.6))
    got = sauvola(GrayImage(levels), SauvolaParams(window, k)).mask
    assert np.array_equal(got, np.array(naive_sauvola(levels.tolist(), window, k)))


def test_constant_images():
    bright = GrayImage.from_intensities(np.full((20, 20), 0.9))
    # sd = 0 puts the threshold at m(1 - k) < m
    assert not sauvola(bright, SauvolaParams(15, 0.2)).mask.any()
    black = GrayImage(np.zeros((20, 20), dtype=np.uint8))
    assert sauvola(black, SauvolaParams(15, 0.2)).mask.all()


def test_larger_k_marks_less_foreground(rng):
    gray, _ = make_document(rng, 48, 64)
    counts = [sauvola(gray, SauvolaParams(15, k)).mask.sum() for k in (0.05, 0.2, 0.4, 0.6)]
    assert counts == sorted(counts, reverse=True)


@pytest.mark.parametrize("window,k", [(2, 0.2), (4, 0.2), (1, 0.2), (15, 0.0), (15, 0.7)])
def test_invalid_params(window, k):
    with pytest.raises(ValueError):
        SauvolaParams(window, k)


class FeatureProbe:
    """Stand-in surrogate: a fixed linear score of the features."""

    def __init__(self):
        self.calls = 0

    def predict(self, X):
        self.calls += 1
        X = np.atleast_2d(X)
        return 80.0 + 0.3 * X[:, 0] - 2.0 * X[:, 1] - 30.0 * X[:, 2]


@pytest.fixture(scope="module")
def doc():
    return make_document(np.random.default_rng(11), 48, 64)


def test_auto_budget_and_incumbent(doc, tmp_path):
    gray, _ = doc
    model = FeatureProbe()
    res = auto_binarize(gray, model, budget=8, seed=2)
    assert model.calls <= 8 and res.state.iteration == 8
    assert res.predicted == max(res.state.values)
    assert res.params.window % 2 == 1 and 3 <= res.params.window <= 51
    assert 0.01 <= res.params.k <= 0.6
    assert np.array_equal(res.binary.mask, sauvola(gray, res.params).mask)
    want = model.predict([build_features(gray, res.binary).inputs])[0]
    assert res.predicted == pytest.approx(want, abs=1e-12)

    path = tmp_path / "trace.csv"
    res.write_trace(path)
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 8
    assert {"w", "k", "half_window", "sensitivity", "value"} <= set(rows[0])


def test_auto_deterministic(doc):
    gray, _ = doc
    a = auto_binarize(gray, FeatureProbe(), budget=6, seed=4)
    b = auto_binarize(gray, FeatureProbe(), budget=6, seed=4)
    assert a.params == b.params and np.array_equal(a.binary.mask, b.binary.mask)


def test_auto_true_score_not_worst(doc):
    gray, gt = doc
    res = auto_binarize(gray, FeatureProbe(), budget=10, seed=0)
    trace_f = [
        build_target(sauvola(gray, SauvolaParams(int(2 * p[0] + 1), float(p[1]))), gt)
        for p in res.state.points
    ]
    assert build_target(res.binary, gt) >= min(trace_f)


def test_auto_survives_bad_predictions(doc):
    gray, _ = doc

    class Nan:
        def predict(self, X):
            return np.full(len(X), np.nan)

    res = auto_binarize(gray, Nan(), budget=5, seed=0)
    assert res.predicted == -np.inf
    assert res.binary is not None


def test_auto_bad_window_bounds(doc):
    with pytest.raises(ValueError):
        auto_binarize(doc[0], FeatureProbe(), window_bounds=(3, 4))
