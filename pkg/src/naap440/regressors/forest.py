"""Random forest: bootstrap-resampled CART trees, averaged.

Every split considers all features (the common regression-forest default);
the only randomness is the bootstrap draw.  Tree t draws from stream(seed, t),
so a 25-tree forest is a prefix of the 200-tree forest for the same seed.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .base import FittedModel, RegressorSpec, register
from .seeding import stream
from .tree import Node, build_tree, predict_tree


class ForestModel(FittedModel):
    def __init__(self, spec: RegressorSpec, trees: list[Node], num_features: int):
        super().__init__(spec, num_features)
        self.trees = trees

    def _predict(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros(len(X))
        for tree in self.trees:
            total += predict_tree(tree, X)
        return total / len(self.trees)


@register("RandomForest",
          {"n_estimators": 100, "max_depth": None, "min_samples_split": 2,
           "min_samples_leaf": 1},
          stochastic=True, aliases=("forest", "rf"))
def fit_forest(X, y, params, spec) -> ForestModel:
    n_estimators = int(params["n_estimators"])
    if n_estimators < 1:
        raise ConfigError(f"n_estimators must be >= 1, got {n_estimators}")
    n = len(y)
    trees = []
    for t in range(n_estimators):
        rng = stream(spec.seed, t)
        idx = rng.integers(0, n, size=n)
        trees.append(build_tree(X[idx], y[idx], params["max_depth"],
                                int(params["min_samples_split"]),
                                int(params["min_samples_leaf"])))
    return ForestModel(spec, trees, X.shape[1])
