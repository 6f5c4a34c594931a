"""k-nearest-neighbors regression: unweighted mean of the k closest rows."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .base import FittedModel, RegressorSpec, register


class KNNModel(FittedModel):
    def __init__(self, spec: RegressorSpec, X: np.ndarray, y: np.ndarray, k: int):
        super().__init__(spec, X.shape[1])
        self.X = X
        self.y = y
        self.k = k

    def _predict(self, X: np.ndarray) -> np.ndarray:
        # squared Euclidean distances, queries by rows
        d2 = ((X[:, None, :] - self.X[None, :, :]) ** 2).sum(axis=2)
        # stable sort so equal distances resolve to the lowest training row id
        nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        return self.y[nearest].mean(axis=1)


@register("KNN", {"k": 5}, aliases=("k-nn", "nearestneighbors"))
def fit_knn(X, y, params, spec) -> KNNModel:
    k = int(params["k"])
    if k < 1:
        raise ConfigError(f"KNN k must be >= 1, got {k}")
    if k > len(y):
        raise ConfigError(f"KNN k={k} exceeds the {len(y)} training rows")
    return KNNModel(spec, X.copy(), y.copy(), k)
