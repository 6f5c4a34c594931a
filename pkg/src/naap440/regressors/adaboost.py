"""AdaBoost.R2: boosted regression trees with weighted-median prediction.

Each round draws a weighted bootstrap sample, fits a shallow tree, measures
relative absolute errors on the full training set, and reweights samples by
beta^(1 - loss).  Rounds whose weighted loss reaches 0.5 are discarded and
boosting stops.  Prediction is the weighted median across rounds.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .base import FittedModel, RegressorSpec, register
from .seeding import stream
from .tree import Node, build_tree, predict_tree

_LOSSES = ("linear", "square", "exponential")


class AdaBoostModel(FittedModel):
    def __init__(self, spec: RegressorSpec, trees: list[Node],
                 weights: np.ndarray, num_features: int):
        super().__init__(spec, num_features)
        self.trees = trees
        self.weights = weights

    def _predict(self, X: np.ndarray) -> np.ndarray:
        preds = np.column_stack([predict_tree(t, X) for t in self.trees])
        order = np.argsort(preds, axis=1)
        cdf = np.cumsum(self.weights[order], axis=1)
        at_median = cdf >= 0.5 * cdf[:, -1][:, None]
        pick = order[np.arange(len(X)), at_median.argmax(axis=1)]
        return preds[np.arange(len(X)), pick]


@register("AdaBoost",
          {"n_estimators": 50, "learning_rate": 1.0, "loss": "linear",
           "max_depth": 3, "min_samples_split": 2, "min_samples_leaf": 1},
          stochastic=True, aliases=("adaboostr2", "ada"))
def fit_adaboost(X, y, params, spec) -> AdaBoostModel:
    n_estimators = int(params["n_estimators"])
    lr = float(params["learning_rate"])
    loss = params["loss"]
    if n_estimators < 1:
        raise ConfigError(f"n_estimators must be >= 1, got {n_estimators}")
    if lr <= 0:
        raise ConfigError(f"learning_rate must be > 0, got {lr}")
    if loss not in _LOSSES:
        raise ConfigError(f"loss must be one of {_LOSSES}, got {loss!r}")
    n = len(y)
    sample_weight = np.full(n, 1.0 / n)
    trees: list[Node] = []
    weights: list[float] = []
    for t in range(n_estimators):
        rng = stream(spec.seed, t)
        idx = rng.choice(n, size=n, replace=True, p=sample_weight)
        tree = build_tree(X[idx], y[idx], params["max_depth"],
                          int(params["min_samples_split"]),
                          int(params["min_samples_leaf"]))
        err = np.abs(predict_tree(tree, X) - y)
        err_max = err.max()
        if err_max <= 0:
            # perfect round: keep it with full confidence and stop
            trees.append(tree)
            weights.append(1.0)
            break
        err /= err_max
        if loss == "square":
            err = err ** 2
        elif loss == "exponential":
            err = 1.0 - np.exp(-err)
        estimator_error = float((sample_weight * err).sum())
        if estimator_error >= 0.5:
            # discard the failed round unless it is all we have
            if not trees:
                trees.append(tree)
                weights.append(0.0)
            break
        if estimator_error <= 0:
            trees.append(tree)
            weights.append(1.0)
            break
        beta = estimator_error / (1.0 - estimator_error)
        trees.append(tree)
        weights.append(lr * np.log(1.0 / beta))
        sample_weight *= beta ** (lr * (1.0 - err))
        sample_weight /= sample_weight.sum()
    return AdaBoostModel(spec, trees, np.array(weights), X.shape[1])
