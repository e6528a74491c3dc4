"""Error measures for surrogate predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import RrseUndefinedError

__all__ = ["EvalReport", "evaluate"]


@dataclass(frozen=True)
class EvalReport:
    rrse: float
    mae: float
    rmse: float

    CSV_HEADER = "rrse,mae,rmse"

    def csv_row(self) -> str:
        return f"{self.rrse:.6f},{self.mae:.6f},{self.rmse:.6f}"


def evaluate(pred, actual) -> EvalReport:
    """Root relative squared error, mean absolute error and RMSE.

    RRSE divides by the squared error of the mean predictor, so it is 1 for
    a model no better than predicting the average.  Raises
    :class:`RrseUndefinedError` (carrying MAE and RMSE) when ``actual`` is
    constant.
    """
    p = np.asarray(pred, dtype=float).ravel()
    a = np.asarray(actual, dtype=float).ravel()
    if p.shape != a.shape:
        raise ValueError(f"length mismatch: {p.size} predictions, {a.size} actual values")
    if a.size < 2:
        raise ValueError("need at least two values to evaluate")
    sq = float(np.sum((p - a) ** 2))
    mae = float(np.mean(np.abs(p - a)))
    rmse = math.sqrt(sq / a.size)
    spread = float(np.sum((a - a.mean()) ** 2))
    if spread == 0:
        raise RrseUndefinedError("RRSE undefined: actual values are constant", mae, rmse)
    return EvalReport(rrse=math.sqrt(sq / spread), mae=mae, rmse=rmse)
