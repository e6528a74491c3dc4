"""End-to-end helpers: feature tables from images, hold-out training and scoring."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from . import dataset
from .binarize import SauvolaParams, sauvola
from .dataset import FeatureRow, TrainingSet, build_features, build_target
from .errors import DomainError
from .imaging import load_binary, load_gray
from .surrogates import EnsembleModel, evaluate, fit_model

__all__ = [
    "rows_from_manifest",
    "sauvola_sweep",
    "group_of",
    "HoldoutResult",
    "holdout",
]

log = logging.getLogger(__name__)


def rows_from_manifest(entries, sauvola_params=None):
    """Feature rows (with targets) for every manifest entry that has a ground truth.

    Entries without a processed image are binarized with ``sauvola_params``
    when given, otherwise skipped.  Returns ``(rows, skipped_ids)``.
    """
    rows, skipped = [], []
    for e in entries:
        if e.gt_path is None:
            log.warning("%s: no ground truth, skipped", e.id)
            skipped.append(e.id)
            continue
        original = load_gray(e.original_path)
        if e.processed_path is not None:
            processed = load_binary(e.processed_path)
        elif sauvola_params is not None:
            processed = sauvola(original, sauvola_params)
        else:
            log.warning("%s: no processed image, skipped", e.id)
            skipped.append(e.id)
            continue
        gt = load_binary(e.gt_path)
        feats = build_features(original, processed, id=e.id)
        rows.append(FeatureRow(e.id, feats.inputs, build_target(processed, gt)))
    return rows, skipped


def sauvola_sweep(corpus, per_document=5, seed=0, window_bounds=(3, 51)):
    """Binarize each ``(id, gray, gt)`` at random Sauvola settings.

    Row ids are ``<doc id>/<setting index>``.  Pairs whose features are
    undefined (e.g. an all-background result) are dropped.
    """
    rng = np.random.default_rng([seed, 7])
    lo, hi = (window_bounds[0] - 1) // 2, (window_bounds[1] - 1) // 2
    rows = []
    for doc_id, gray, gt in corpus:
        for s in range(per_document):
            p = SauvolaParams(2 * int(rng.integers(lo, hi + 1)) + 1, float(rng.uniform(0.01, 0.6)))
            binary = sauvola(gray, p)
            try:
                feats = build_features(gray, binary, id=doc_id)
            except DomainError as exc:
                log.info("dropped %s/%d: %s", doc_id, s, exc)
                continue
            rows.append(FeatureRow(f"{doc_id}/{s}", feats.inputs, build_target(binary, gt)))
    return rows


def group_of(row_id: str) -> str:
    return row_id.split("/", 1)[0]


@dataclass
class HoldoutResult:
    kind: str
    model: object
    predictions: np.ndarray
    actual: np.ndarray
    report: object
    train_seconds: float
    predict_seconds: float


def holdout(rows, train_fraction=None, train_count=None, kinds=("svr", "gp", "ann", "ensemble"),
            seed=0, fit_kwargs=None):
    """Split by document group, train each model kind, score on the held-out rows.

    Give either ``train_fraction`` or ``train_count`` (number of groups).
    """
    groups = sorted({group_of(r.id) for r in rows})
    if train_count is None:
        train_count = int(round(len(groups) * (train_fraction if train_fraction is not None else 0.7)))
    train_groups, _ = dataset.split(groups, train_count, seed)
    train_groups = set(train_groups)
    train_rows = [r for r in rows if group_of(r.id) in train_groups]
    test_rows = [r for r in rows if group_of(r.id) not in train_groups]
    ts = TrainingSet.from_rows(train_rows)
    X_test = np.array([r.inputs for r in test_rows], dtype=float)
    y_test = np.array([r.target for r in test_rows], dtype=float)
    fit_kwargs = fit_kwargs or {}
    results = {}
    for kind in kinds:
        t0 = time.perf_counter()
        if kind == "ensemble" and all(k in results for k in ("gp", "svr", "ann")):
            # reuse the members already trained on this split
            model = EnsembleModel(results["gp"].model, results["svr"].model, results["ann"].model)
            t0 -= sum(results[k].train_seconds for k in ("gp", "svr", "ann"))
        else:
            model = fit_model(kind, ts, seed=seed, **fit_kwargs.get(kind, {}))
        t1 = time.perf_counter()
        pred = model.predict(X_test)
        t2 = time.perf_counter()
        results[kind] = HoldoutResult(
            kind, model, pred, y_test, evaluate(pred, y_test), t1 - t0, t2 - t1
        )
        log.info("%s: %s train %.3fs", kind, results[kind].report, t1 - t0)
    return results
