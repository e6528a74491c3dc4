"""Averaging ensemble of the GP, SVR and ANN surrogates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import TrainingSet
from .ann import AnnModel, ann_fit
from .gp import GpModel, gp_fit
from .svr import SvrModel, svr_fit

__all__ = ["EnsembleModel", "ensemble_fit", "ensemble_predict"]


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    gp: GpModel
    svr: SvrModel
    ann: AnnModel

    kind = "ensemble"

    @property
    def members(self):
        return (self.gp, self.svr, self.ann)

    def predict(self, X):
        return (self.gp.predict(X) + self.svr.predict(X) + self.ann.predict(X)) / 3.0


def ensemble_fit(ts: TrainingSet, seed=0, svr_hyper="auto", svr_budget=30, hidden=10,
                 max_epochs=100) -> EnsembleModel:
    return EnsembleModel(
        gp=gp_fit(ts, seed=seed),
        svr=svr_fit(ts, hyper=svr_hyper, budget=svr_budget, seed=seed),
        ann=ann_fit(ts, hidden=hidden, seed=seed, max_epochs=max_epochs),
    )


def ensemble_predict(e: EnsembleModel, x) -> np.ndarray:
    return e.predict(x)
