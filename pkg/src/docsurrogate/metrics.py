"""Ground-truth-referenced quality metrics for binarized document images.

F-Measure (percent), PSNR (dB), DRD and NRM, all computed between a
predicted :class:`~docsurrogate.imaging.BinaryImage` and a reference one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EmptyClassError
from .imaging import BinaryImage

__all__ = [
    "ConfusionCounts",
    "MetricReport",
    "confusion",
    "f_measure",
    "mse",
    "psnr",
    "drd_weights",
    "nubn",
    "drd",
    "nrm",
    "all_metrics",
    "format_value",
]

DRD_RADIUS = 2
NUBN_BLOCK = 8


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricReport:
    f_measure: float
    psnr: float
    drd: float
    nrm: float

    CSV_HEADER = "id,f_measure,psnr,drd,nrm"

    def csv_row(self, id="") -> str:
        vals = (self.f_measure, self.psnr, self.drd, self.nrm)
        return ",".join([str(id)] + [format_value(v) for v in vals])


def format_value(v: float) -> str:
    """Six-decimal rendering with ``inf`` for the infinite sentinel."""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.6f}"


def _check_shapes(a: BinaryImage, b: BinaryImage):
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def confusion(pred: BinaryImage, ref: BinaryImage) -> ConfusionCounts:
    _check_shapes(pred, ref)
    p, r = pred.mask, ref.mask
    tp = int(np.count_nonzero(p & r))
    fp = int(np.count_nonzero(p & ~r))
    fn = int(np.count_nonzero(~p & r))
    tn = p.size - tp - fp - fn
    return ConfusionCounts(tp, fp, fn, tn)


def f_measure(c: ConfusionCounts) -> float:
    """Harmonic mean of precision and recall, in percent (0 when tp == 0).

    Evaluated as the single ratio ``200 tp / (2 tp + fp + fn)`` so the
    result is the correctly rounded value of the exact rational.
    """
    if c.tp == 0:
        return 0.0
    return (200 * c.tp) / (2 * c.tp + c.fp + c.fn)


def mse(a: BinaryImage, b: BinaryImage) -> float:
    """Mean squared error with foreground encoded as 0 and background as 1.

    For bilevel images this is just the fraction of differing pixels.
    """
    _check_shapes(a, b)
    return np.count_nonzero(a.mask != b.mask) / a.mask.size


def psnr(a: BinaryImage, b: BinaryImage) -> float:
    """10*log10(C^2 / MSE) with C = 1; ``inf`` for identical images."""
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)


def drd_weights() -> np.ndarray:
    """Normalized 5x5 reciprocal-distance weight matrix (center weight 1 before normalization)."""
    r = np.arange(-DRD_RADIUS, DRD_RADIUS + 1, dtype=float)
    dist = np.hypot(r[:, None], r[None, :])
    raw = np.ones_like(dist)
    nz = dist > 0
    raw[nz] = 1.0 / dist[nz]
    return raw / raw.sum()


def nubn(ref: BinaryImage) -> int:
    """Number of non-uniform 8x8 blocks; partial blocks at the right/bottom edge count."""
    h, w = ref.shape
    bh = -(-h // NUBN_BLOCK)
    bw = -(-w // NUBN_BLOCK)
    # separate fg / bg indicators, both padded with False, so padding never makes a block mixed
    fg = np.zeros((bh * NUBN_BLOCK, bw * NUBN_BLOCK), dtype=bool)
    bg = np.zeros_like(fg)
    fg[:h, :w] = ref.mask
    bg[:h, :w] = ~ref.mask
    shape = (bh, NUBN_BLOCK, bw, NUBN_BLOCK)
    has_fg = fg.reshape(shape).any(axis=(1, 3))
    has_bg = bg.reshape(shape).any(axis=(1, 3))
    return int(np.count_nonzero(has_fg & has_bg))


def _weighted_ref_ink(ref: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per pixel, the sum of weights over 5x5 neighbors that are ink in ``ref``.

    Neighbors outside the image count as background.
    """
    r = DRD_RADIUS
    h, w = ref.shape
    padded = np.zeros((h + 2 * r, w + 2 * r))
    padded[r : r + h, r : r + w] = ref
    out = np.zeros((h, w))
    for di in range(-r, r + 1):
        for dj in range(-r, r + 1):
            wt = weights[di + r, dj + r]
            out += wt * padded[r + di : r + di + h, r + dj : r + dj + w]
    return out


def drd(pred: BinaryImage, ref: BinaryImage) -> float:
    """Distance-reciprocal distortion of ``pred`` against the reference ``ref``.

    Returns 0 when nothing is flipped and ``inf`` (with a warning) when pixels
    are flipped but the reference has no non-uniform block.
    """
    _check_shapes(pred, ref)
    flipped = pred.mask != ref.mask
    if not flipped.any():
        return 0.0
    ink = _weighted_ref_ink(ref.mask, drd_weights())
    # a flipped pixel disagrees with every neighbor of the opposite label:
    # predicted ink -> weight of background neighbors, predicted paper -> ink neighbors
    per_pixel = np.where(pred.mask, 1.0 - ink, ink)
    total = float(per_pixel[flipped].sum())
    blocks = nubn(ref)
    if blocks == 0:
        warnings.warn(
            "DRD undefined: reference has no non-uniform 8x8 block; returning inf",
            RuntimeWarning,
            stacklevel=2,
        )
        return math.inf
    return total / blocks


def nrm(c: ConfusionCounts) -> float:
    """Mean of the false-negative and false-positive rates."""
    if c.tp + c.fn == 0:
        raise EmptyClassError("NRM undefined: reference has no foreground pixels")
    if c.fp + c.tn == 0:
        raise EmptyClassError("NRM undefined: reference has no background pixels")
    pos, neg = c.fn + c.tp, c.fp + c.tn
    # (fn/pos + fp/neg) / 2 over a common integer denominator: one rounding
    return (c.fn * neg + c.fp * pos) / (2 * pos * neg)


def all_metrics(pred: BinaryImage, ref: BinaryImage) -> MetricReport:
    c = confusion(pred, ref)
    return MetricReport(
        f_measure=f_measure(c),
        psnr=psnr(pred, ref),
        drd=drd(pred, ref),
        nrm=nrm(c),
    )
