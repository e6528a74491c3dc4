"""Regression surrogates mapping input-metric vectors to F-Measure."""

from .gp import GpModel, gp_fit, gp_predict
from .svr import SvrModel, svr_fit, svr_predict
from .ann import AnnModel, ann_fit, ann_predict
from .ensemble import EnsembleModel, ensemble_fit, ensemble_predict
from .evaluation import EvalReport, evaluate
from .persistence import load_model, save_model

MODEL_TYPES = ("gp", "svr", "ann", "ensemble")


def fit_model(kind, ts, seed=0, **kwargs):
    """Fit a surrogate by type name."""
    if kind == "gp":
        return gp_fit(ts, seed=seed, **kwargs)
    if kind == "svr":
        return svr_fit(ts, seed=seed, **kwargs)
    if kind == "ann":
        return ann_fit(ts, seed=seed, **kwargs)
    if kind == "ensemble":
        return ensemble_fit(ts, seed=seed, **kwargs)
    raise ValueError(f"unknown model type {kind!r}; expected one of {', '.join(MODEL_TYPES)}")


__all__ = [
    "GpModel", "gp_fit", "gp_predict",
    "SvrModel", "svr_fit", "svr_predict",
    "AnnModel", "ann_fit", "ann_predict",
    "EnsembleModel", "ensemble_fit", "ensemble_predict",
    "EvalReport", "evaluate",
    "load_model", "save_model",
    "MODEL_TYPES", "fit_model",
]
