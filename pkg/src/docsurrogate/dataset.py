"""Training tables built from (original, processed, ground truth) triples.

Each row pairs an input vector ``[psnr_in, drd_in, nrm_in]`` with an
F-Measure target.  The input metrics compare the processed image with an
Otsu-binarized proxy of the grayscale original (both metrics need two
bilevel images); the target compares the processed image with the ground
truth.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics
from .errors import (
    DimensionMismatchError,
    ConditioningError,
    EmptyClassError,
    FeatureError,
    ManifestError,
)
from .imaging import BinaryImage, GrayImage, otsu_binarize

__all__ = [
    "FEATURE_NAMES",
    "PSNR_CLAMP",
    "ManifestEntry",
    "FeatureRow",
    "TrainingSet",
    "build_features",
    "build_target",
    "split",
    "LCG",
    "standardize",
    "read_manifest",
    "write_features_csv",
    "read_features_csv",
]

FEATURE_NAMES = ("psnr_in", "drd_in", "nrm_in")
FEATURES_HEADER = ("id",) + FEATURE_NAMES + ("f_measure_target",)
MANIFEST_HEADER = ("id", "original", "processed", "gt")

# identical images give infinite PSNR; surrogates need finite inputs
PSNR_CLAMP = 60.0


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    original_path: str
    processed_path: str | None = None
    gt_path: str | None = None


@dataclass(frozen=True)
class FeatureRow:
    id: str
    inputs: tuple
    target: float | None = None


@dataclass
class TrainingSet:
    """Design matrix ``X`` (n x T), targets ``y`` and normalization stats.

    A freshly assembled set carries identity stats (means 0, sds 1);
    :func:`standardize` returns a z-scored copy with the stats filled in.
    """

    X: np.ndarray
    y: np.ndarray
    x_mean: np.ndarray = None
    x_std: np.ndarray = None
    y_mean: float = 0.0
    y_std: float = 1.0
    ids: list = field(default_factory=list)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError(f"{self.X.shape[0]} input rows but {self.y.shape[0]} targets")
        d = self.X.shape[1]
        if self.x_mean is None:
            self.x_mean = np.zeros(d)
        if self.x_std is None:
            self.x_std = np.ones(d)
        self.x_mean = np.asarray(self.x_mean, dtype=float)
        self.x_std = np.asarray(self.x_std, dtype=float)

    @classmethod
    def from_rows(cls, rows) -> "TrainingSet":
        rows = list(rows)
        missing = [r.id for r in rows if r.target is None]
        if missing:
            raise ValueError(f"rows without target: {', '.join(missing[:5])}")
        X = np.array([r.inputs for r in rows], dtype=float).reshape(len(rows), len(FEATURE_NAMES))
        y = np.array([r.target for r in rows], dtype=float)
        return cls(X, y, ids=[r.id for r in rows])

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def transform_inputs(self, X) -> np.ndarray:
        return (np.atleast_2d(np.asarray(X, dtype=float)) - self.x_mean) / self.x_std

    def inverse_inputs(self, Z) -> np.ndarray:
        return np.asarray(Z) * self.x_std + self.x_mean

    def inverse_targets(self, z) -> np.ndarray:
        return np.asarray(z) * self.y_std + self.y_mean

    def subset(self, index) -> "TrainingSet":
        index = np.asarray(index)
        ids = [self.ids[i] for i in index] if self.ids else []
        return replace(self, X=self.X[index], y=self.y[index], ids=ids)


# --------------------------------------------------------------------------
# features and targets
# --------------------------------------------------------------------------


def build_features(original: GrayImage, processed: BinaryImage, id: str = "") -> FeatureRow:
    if original.shape != processed.shape:
        raise DimensionMismatchError(
            f"{id or 'entry'}: original is {original.width}x{original.height}, "
            f"processed is {processed.width}x{processed.height}"
        )
    proxy = otsu_binarize(original)
    try:
        c = metrics.confusion(processed, proxy)
        nrm = metrics.nrm(c)
    except EmptyClassError as exc:
        raise FeatureError(f"{id or 'entry'}: {exc}") from None
    psnr = min(metrics.psnr(processed, proxy), PSNR_CLAMP)
    drd = metrics.drd(processed, proxy)
    if not math.isfinite(drd):
        raise FeatureError(f"{id or 'entry'}: DRD undefined for this pair")
    return FeatureRow(id, (psnr, drd, nrm))


def build_target(processed: BinaryImage, gt: BinaryImage) -> float:
    return metrics.f_measure(metrics.confusion(processed, gt))


# --------------------------------------------------------------------------
# deterministic split
# --------------------------------------------------------------------------


class LCG:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``state = state * 6364136223846793005 + 1442695040888963407 (mod 2**64)``;
    each draw returns the top 32 bits.  Kept dependency-free so a split can be
    reproduced in any language from the seed alone.
    """

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u32(self) -> int:
        self.state = (self.state * self.MULTIPLIER + self.INCREMENT) & self.MASK
        return self.state >> 32

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection."""
        limit = (1 << 32) - (1 << 32) % bound
        while True:
            v = self.next_u32()
            if v < limit:
                return v % bound


def split(ids, train_count: int, seed: int):
    """Seeded Fisher-Yates shuffle; the first ``train_count`` ids train.

    Both halves keep the order of the shuffled sequence.
    """
    ids = list(ids)
    if not 0 < train_count < len(ids):
        raise ValueError(f"train_count must be in (0, {len(ids)}), got {train_count}")
    rng = LCG(seed)
    order = ids[:]
    for i in range(len(order) - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    return order[:train_count], order[train_count:]


# --------------------------------------------------------------------------
# normalization
# --------------------------------------------------------------------------


def standardize(ts: TrainingSet) -> TrainingSet:
    """Z-score inputs and targets with population (ddof=0) statistics.

    A constant input column is rejected.  A constant target keeps sd 1 so a
    degenerate table still trains (every model then predicts the constant).
    """
    X = ts.inverse_inputs(ts.X)
    y = ts.inverse_targets(ts.y)
    x_mean = X.mean(axis=0)
    x_std = X.std(axis=0)
    for j, s in enumerate(x_std):
        if not s > 0:
            name = FEATURE_NAMES[j] if ts.dim == len(FEATURE_NAMES) else f"column {j}"
            raise ConditioningError(f"cannot standardize: input column {name} is constant")
    y_mean = float(y.mean())
    y_std = float(y.std())
    if not y_std > 0:
        y_std = 1.0
    return replace(
        ts,
        X=(X - x_mean) / x_std,
        y=(y - y_mean) / y_std,
        x_mean=x_mean,
        x_std=x_std,
        y_mean=y_mean,
        y_std=y_std,
    )


# --------------------------------------------------------------------------
# CSV files
# --------------------------------------------------------------------------


def _cell(v: str | None) -> str | None:
    v = (v or "").strip()
    return v or None


def read_manifest(path) -> list[ManifestEntry]:
    """Parse ``id,original,processed,gt``; relative paths resolve against the manifest's directory."""
    base = os.path.dirname(os.path.abspath(os.fspath(path)))

    def resolve(p):
        return None if p is None else os.path.normpath(os.path.join(base, p))

    try:
        fh = open(os.fspath(path), newline="", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"{path}: {exc.strerror}") from None
    entries, seen = [], set()
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"id", "original"} <= set(reader.fieldnames):
            raise ManifestError(f"{path}: header must contain {','.join(MANIFEST_HEADER)}")
        for row in reader:
            line = reader.line_num
            eid = _cell(row.get("id"))
            if eid is None:
                raise ManifestError(f"{path}:{line}: missing id")
            if eid in seen:
                raise ManifestError(f"{path}:{line}: duplicate id {eid!r}")
            original = _cell(row.get("original"))
            if original is None:
                raise ManifestError(f"{path}:{line}: missing original path for {eid!r}")
            seen.add(eid)
            entries.append(
                ManifestEntry(
                    eid,
                    resolve(original),
                    resolve(_cell(row.get("processed"))),
                    resolve(_cell(row.get("gt"))),
                )
            )
    return entries


def write_manifest(entries, path) -> None:
    with open(os.fspath(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_HEADER)
        for e in entries:
            w.writerow([e.id, e.original_path, e.processed_path or "", e.gt_path or ""])


def write_features_csv(rows, path) -> None:
    with open(os.fspath(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FEATURES_HEADER)
        for r in rows:
            target = "" if r.target is None else repr(float(r.target))
            w.writerow([r.id] + [repr(float(v)) for v in r.inputs] + [target])


def read_features_csv(path) -> list[FeatureRow]:
    try:
        fh = open(os.fspath(path), newline="", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"{path}: {exc.strerror}") from None
    rows = []
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(FEATURES_HEADER[:-1]) <= set(reader.fieldnames):
            raise ManifestError(f"{path}: header must contain {','.join(FEATURES_HEADER)}")
        for row in reader:
            try:
                inputs = tuple(float(row[name]) for name in FEATURE_NAMES)
                target = _cell(row.get("f_measure_target"))
                target = None if target is None else float(target)
            except (TypeError, ValueError):
                raise ManifestError(f"{path}:{reader.line_num}: non-numeric value") from None
            rows.append(FeatureRow(row["id"], inputs, target))
    return rows
