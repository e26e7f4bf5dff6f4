"""Ordinary least squares on one predictor, for scalability projections."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DegenerateX(ValueError):
    """Need at least two distinct x values."""


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r: float
    r2: float

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r": self.r, "r2": self.r2}


def fit_linear(xs: Sequence[float], ys: Sequence[float]) -> RegressionFit:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.size < 2 or np.all(x == x[0]):
        raise DegenerateX("need >= 2 distinct x values")
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(np.dot(xm, xm))
    sxy = float(np.dot(xm, ym))
    syy = float(np.dot(ym, ym))
    slope = sxy / sxx
    intercept = float(y.mean() - slope * x.mean())
    if syy == 0.0:
        # constant y: perfectly fit by the horizontal line
        r = 1.0 if slope == 0.0 else 0.0
    else:
        r = sxy / np.sqrt(sxx * syy)
    return RegressionFit(slope=slope, intercept=intercept, r=float(r), r2=float(r * r))


def predict_linear(fit: RegressionFit, x: float) -> float:
    return fit.intercept + fit.slope * x
