"""Linear least squares with the optional degree-D target transform.

A degree-D model predicts (w . x + 1)^D.  It is fit by ordinary least squares
on the transformed targets y^(1/D) - 1, so D=1 collapses to plain linear
regression (the shift is absorbed by the intercept).
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .base import FittedModel, RegressorSpec, register


class LinearModel(FittedModel):
    def __init__(self, spec: RegressorSpec, weights: np.ndarray, degree: float):
        super().__init__(spec, len(weights) - 1)
        self.weights = weights  # last entry is the intercept
        self.degree = degree

    def _predict(self, X: np.ndarray) -> np.ndarray:
        base = X @ self.weights[:-1] + self.weights[-1] + 1.0
        d = self.degree
        if d == 1.0:
            return base
        if float(d).is_integer():
            return base ** d
        # fractional power needs a nonnegative base; clamp keeps predictions
        # real and continuous at the boundary
        return np.maximum(base, 0.0) ** d


@register("Linear", {"degree": 1.0}, aliases=("linearregression", "ols"))
def fit_linear(X, y, params, spec) -> LinearModel:
    degree = float(params["degree"])
    if degree <= 0:
        raise ConfigError(f"Linear degree must be > 0, got {degree}")
    if not float(degree).is_integer() and (y < 0).any():
        raise ConfigError(
            f"degree {degree} needs nonnegative targets (real root required)"
        )
    z = np.sign(y) * np.abs(y) ** (1.0 / degree) - 1.0 if float(degree).is_integer() \
        else y ** (1.0 / degree) - 1.0
    A = np.column_stack([X, np.ones(len(y))])
    weights, *_ = np.linalg.lstsq(A, z, rcond=None)
    return LinearModel(spec, weights, degree)


def fit_linear_degree(D: float, X, y, seed: int = 0) -> LinearModel:
    """Convenience wrapper: fit the degree-D linear family directly."""
    from .base import fit

    return fit(RegressorSpec("Linear", {"degree": D}, seed), X, y)
