"""Gradient boosting for squared loss: shallow trees fit to residuals.

The model starts from the target mean and adds learning_rate times a depth-3
tree per stage, each fit to the current residuals.  No subsampling, so the
fit is deterministic.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .base import FittedModel, RegressorSpec, register
from .tree import Node, build_tree, predict_tree


class GBoostModel(FittedModel):
    def __init__(self, spec: RegressorSpec, base: float, trees: list[Node],
                 learning_rate: float, num_features: int):
        super().__init__(spec, num_features)
        self.base = base
        self.trees = trees
        self.learning_rate = learning_rate

    def _predict(self, X: np.ndarray) -> np.ndarray:
        # Sum raw tree outputs first and scale once, so that a prefix of a
        # longer model reproduces the shorter model bit for bit.
        acc = np.zeros(len(X))
        for tree in self.trees:
            acc += predict_tree(tree, X)
        return self.base + self.learning_rate * acc


@register("GradientBoosting",
          {"n_estimators": 100, "learning_rate": 0.1, "max_depth": 3,
           "min_samples_split": 2, "min_samples_leaf": 1},
          aliases=("gboost", "gb", "gbr"))
def fit_gboost(X, y, params, spec) -> GBoostModel:
    n_estimators = int(params["n_estimators"])
    lr = float(params["learning_rate"])
    if n_estimators < 1:
        raise ConfigError(f"n_estimators must be >= 1, got {n_estimators}")
    if not 0 < lr <= 1:
        raise ConfigError(f"learning_rate must be in (0, 1], got {lr}")
    base = float(y.mean())
    current = np.full(len(y), base)
    trees = []
    for _ in range(n_estimators):
        tree = build_tree(X, y - current, params["max_depth"],
                          int(params["min_samples_split"]),
                          int(params["min_samples_leaf"]))
        current += lr * predict_tree(tree, X)
        trees.append(tree)
    return GBoostModel(spec, base, trees, lr, X.shape[1])
