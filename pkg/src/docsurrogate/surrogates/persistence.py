"""Versioned JSON model files.

Every file is a single JSON object::

    {"format": "docsurrogate-model", "version": 1, "type": "gp" | "svr" | "ann" | "ensemble",
     "stats": {...}, "params": {...}}

Floats are written with ``repr`` precision, so a saved model predicts
bit-identically after loading.
"""

from __future__ import annotations

import json
import os

import numpy as np

from ..errors import ModelFormatError
from .ann import AnnModel
from .ensemble import EnsembleModel
from .gp import GpModel
from .svr import SvrModel

__all__ = ["FORMAT", "VERSION", "to_dict", "from_dict", "save_model", "load_model"]

FORMAT = "docsurrogate-model"
VERSION = 1


def _stats(m):
    return {
        "x_mean": m.x_mean.tolist(),
        "x_std": m.x_std.tolist(),
        "y_mean": m.y_mean,
        "y_std": m.y_std,
    }


def _params(m):
    if isinstance(m, GpModel):
        return {
            "X": m.X.tolist(),
            "y": m.y.tolist(),
            "lengthscale": m.lengthscale,
            "signal_var": m.signal_var,
            "noise_var": m.noise_var,
        }
    if isinstance(m, SvrModel):
        return {
            "support_vectors": m.support_vectors.tolist(),
            "dual_coef": m.dual_coef.tolist(),
            "bias": m.bias,
            "gamma": m.gamma,
            "C": m.C,
            "epsilon": m.epsilon,
            "dim": int(m.x_mean.size),
        }
    if isinstance(m, AnnModel):
        return {
            "layer_sizes": list(m.layer_sizes),
            "W1": m.W1.tolist(),
            "b1": m.b1.tolist(),
            "w2": m.w2.tolist(),
            "b2": m.b2,
        }
    raise TypeError(f"not a surrogate model: {type(m).__name__}")


def to_dict(model) -> dict:
    head = {"format": FORMAT, "version": VERSION, "type": model.kind}
    if isinstance(model, EnsembleModel):
        head["members"] = {k: to_dict(getattr(model, k)) for k in ("gp", "svr", "ann")}
        return head
    head["stats"] = _stats(model)
    head["params"] = _params(model)
    return head


def from_dict(doc: dict):
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ModelFormatError("not a docsurrogate model file")
    if doc.get("version") != VERSION:
        raise ModelFormatError(
            f"unsupported model file version {doc.get('version')!r} (expected {VERSION})"
        )
    kind = doc.get("type")
    try:
        if kind == "ensemble":
            mem = doc["members"]
            return EnsembleModel(
                gp=from_dict(mem["gp"]), svr=from_dict(mem["svr"]), ann=from_dict(mem["ann"])
            )
        st = doc["stats"]
        p = doc["params"]
        stats = dict(
            x_mean=np.array(st["x_mean"], dtype=float),
            x_std=np.array(st["x_std"], dtype=float),
            y_mean=float(st["y_mean"]),
            y_std=float(st["y_std"]),
        )
        if kind == "gp":
            return GpModel.build(
                np.array(p["X"], dtype=float), np.array(p["y"], dtype=float),
                p["lengthscale"], p["signal_var"], p["noise_var"], **stats,
            )
        if kind == "svr":
            sv = np.array(p["support_vectors"], dtype=float).reshape(-1, int(p["dim"]))
            return SvrModel(
                support_vectors=sv, dual_coef=np.array(p["dual_coef"], dtype=float),
                bias=float(p["bias"]), gamma=float(p["gamma"]), C=float(p["C"]),
                epsilon=float(p["epsilon"]), **stats,
            )
        if kind == "ann":
            return AnnModel(
                W1=np.array(p["W1"], dtype=float), b1=np.array(p["b1"], dtype=float),
                w2=np.array(p["w2"], dtype=float), b2=float(p["b2"]), **stats,
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt {kind} model: {exc}") from None
    raise ModelFormatError(f"unknown model type {kind!r}")


def save_model(model, path) -> None:
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        json.dump(to_dict(model), fh, indent=1)
        fh.write("\n")


def load_model(path):
    try:
        with open(os.fspath(path), encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelFormatError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc.msg})") from None
    return from_dict(doc)
