"""Sauvola local thresholding and surrogate-driven automatic binarization.

``auto_binarize`` closes the loop: Bayesian optimization searches Sauvola's
(window, k) to maximize the F-Measure a trained surrogate predicts from the
input-metric features, so no ground truth is needed at run time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bayesopt import BoProblem, BoState, optimize, write_trace_csv
from .dataset import build_features
from .errors import DomainError
from .imaging import BinaryImage, GrayImage

__all__ = [
    "SauvolaParams",
    "sauvola",
    "AutoResult",
    "auto_binarize",
    "DYNAMIC_RANGE",
    "DEFAULT_WINDOW_BOUNDS",
    "DEFAULT_K_BOUNDS",
]

DYNAMIC_RANGE = 0.5
K_MIN, K_MAX = 0.01, 0.6
DEFAULT_WINDOW_BOUNDS = (3, 51)
DEFAULT_K_BOUNDS = (K_MIN, K_MAX)


@dataclass(frozen=True)
class SauvolaParams:
    window: int
    k: float

    def __post_init__(self):
        w = self.window
        if int(w) != w or w < 3 or w % 2 == 0:
            raise ValueError(f"window must be an odd integer >= 3, got {w}")
        if not K_MIN <= self.k <= K_MAX:
            raise ValueError(f"k must lie in [{K_MIN}, {K_MAX}], got {self.k}")
        object.__setattr__(self, "window", int(w))
        object.__setattr__(self, "k", float(self.k))


def _integral(a):
    out = np.zeros((a.shape[0] + 1, a.shape[1] + 1), dtype=np.int64)
    np.cumsum(np.cumsum(a, axis=0), axis=1, out=out[1:, 1:])
    return out


def sauvola(img: GrayImage, p: SauvolaParams) -> BinaryImage:
    """Foreground where ``I <= m * (1 + k * (s / R - 1))``.

    ``m`` and ``s`` are the mean and (population) standard deviation over the
    w x w window, truncated at the image border.  Window sums are exact
    integer sums of 8-bit levels, so the cost is O(pixels) for any window.
    """
    lv = img.levels.astype(np.int64)
    h, w = lv.shape
    r = p.window // 2
    S1 = _integral(lv)
    S2 = _integral(lv * lv)
    rows = np.arange(h)
    cols = np.arange(w)
    r0 = np.maximum(rows - r, 0)[:, None]
    r1 = np.minimum(rows + r, h - 1)[:, None] + 1
    c0 = np.maximum(cols - r, 0)[None, :]
    c1 = np.minimum(cols + r, w - 1)[None, :] + 1
    total = S1[r1, c1] - S1[r0, c1] - S1[r1, c0] + S1[r0, c0]
    total_sq = S2[r1, c1] - S2[r0, c1] - S2[r1, c0] + S2[r0, c0]
    count = (r1 - r0) * (c1 - c0)
    scale = 255.0 * count
    mean = total / scale
    sd = np.sqrt((count * total_sq - total * total).astype(float)) / scale
    threshold = mean * (1.0 + p.k * (sd / DYNAMIC_RANGE - 1.0))
    return BinaryImage(lv / 255.0 <= threshold)


@dataclass
class AutoResult:
    binary: BinaryImage
    params: SauvolaParams
    predicted: float
    state: BoState
    problem: BoProblem

    def write_trace(self, path):
        extra_rows = [(int(2 * p[0] + 1), repr(float(p[1]))) for p in self.state.points]
        write_trace_csv(self.state, self.problem, path, extra=(("w", "k"), extra_rows))


def auto_binarize(
    img: GrayImage,
    model,
    window_bounds=DEFAULT_WINDOW_BOUNDS,
    k_bounds=DEFAULT_K_BOUNDS,
    budget: int = 25,
    seed: int = 0,
) -> AutoResult:
    """Search Sauvola parameters maximizing the surrogate-predicted F-Measure.

    ``model`` is any trained surrogate exposing ``predict(rows)``.  Exactly
    ``budget`` binarizations are computed; the incumbent's image is kept
    rather than recomputed.
    """
    w_lo, w_hi = window_bounds
    k_lo, k_hi = k_bounds
    # the window is searched as its half-width so every rounded value is odd
    r_lo, r_hi = max(1, math.ceil((w_lo - 1) / 2)), math.floor((w_hi - 1) / 2)
    if r_hi <= r_lo:
        raise ValueError(f"window bounds {window_bounds} leave fewer than two odd sizes")
    problem = BoProblem(
        (r_lo - 0.499, max(k_lo, K_MIN)),
        (r_hi + 0.499, min(k_hi, K_MAX)),
        integer=(True, False),
        names=("half_window", "sensitivity"),
    )
    best = {"value": -math.inf, "binary": None}

    def objective(point):
        params = SauvolaParams(int(2 * point[0] + 1), float(point[1]))
        binary = sauvola(img, params)
        try:
            row = build_features(img, binary)
            value = float(np.asarray(model.predict([row.inputs])).ravel()[0])
        except DomainError:
            value = -math.inf
        if not math.isfinite(value):
            value = -math.inf
        # first maximum wins, matching BoState.best_index
        if best["binary"] is None or value > best["value"]:
            best.update(value=value, binary=binary)
        return value

    state = optimize(objective, problem, budget=budget, seed=seed)
    point = state.best_point
    params = SauvolaParams(int(2 * point[0] + 1), float(point[1]))
    return AutoResult(
        binary=best["binary"],
        params=params,
        predicted=state.best_value,
        state=state,
        problem=problem,
    )
