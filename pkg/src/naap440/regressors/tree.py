"""CART regression tree with variance-reduction splits.

Splits minimize the summed squared error of the two children, scanned with
prefix sums over each feature's sorted values.  Ties resolve to the lowest
feature index, then the lowest threshold, so the tree is a pure function of
the training data.  Default growth is to purity (no depth cap).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .base import FittedModel, RegressorSpec, register

_PURITY_EPS = 1e-12


@dataclass
class Node:
    value: float
    feature: int = -1
    threshold: float = 0.0
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def _best_split(X: np.ndarray, y: np.ndarray, min_samples_leaf: int):
    """Return (gain, feature, threshold) of the best split, or None.

    Gain is the reduction in summed squared error; maximizing it is the same
    as maximizing sum_left^2/n_left + sum_right^2/n_right.  All features are
    scanned in one batched pass; ties resolve to the lowest feature index,
    then the lowest threshold.
    """
    n, d = X.shape
    order = np.argsort(X, axis=0, kind="stable")
    xo = np.take_along_axis(X, order, axis=0)
    cum = np.cumsum(y[order], axis=0)[:-1]
    total = y.sum()
    k = np.arange(1, n)[:, None]
    with np.errstate(invalid="ignore"):
        gains = cum * cum / k + (total - cum) ** 2 / (n - k) - total * total / n
    valid = xo[1:] > xo[:-1]
    if min_samples_leaf > 1:
        valid &= (k >= min_samples_leaf) & (n - k >= min_samples_leaf)
    gains[~valid] = -np.inf
    # transpose so the flat argmax scans feature-major: lowest feature wins
    flat = int(np.argmax(gains.T))
    f, pos = divmod(flat, n - 1)
    if not np.isfinite(gains[pos, f]):
        return None
    return float(gains[pos, f]), f, 0.5 * (xo[pos, f] + xo[pos + 1, f])


def build_tree(X: np.ndarray, y: np.ndarray, max_depth: int | None = None,
               min_samples_split: int = 2, min_samples_leaf: int = 1) -> Node:
    """Grow a tree iteratively (no recursion, so degenerate chains are safe)."""
    root = Node(value=float(y.mean()))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        ys = y[idx]
        if len(idx) < min_samples_split:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        if ys.var() * len(idx) <= _PURITY_EPS:
            continue
        found = _best_split(X[idx], ys, min_samples_leaf)
        if found is None or found[0] <= _PURITY_EPS:
            continue
        _, node.feature, node.threshold = found
        mask = X[idx, node.feature] <= node.threshold
        left_idx, right_idx = idx[mask], idx[~mask]
        node.left = Node(value=float(y[left_idx].mean()))
        node.right = Node(value=float(y[right_idx].mean()))
        stack.append((node.left, left_idx, depth + 1))
        stack.append((node.right, right_idx, depth + 1))
    return root


def predict_tree(root: Node, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X))
    for i, row in enumerate(X):
        node = root
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold else node.right
        out[i] = node.value
    return out


class TreeModel(FittedModel):
    def __init__(self, spec: RegressorSpec, root: Node, num_features: int):
        super().__init__(spec, num_features)
        self.root = root

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return predict_tree(self.root, X)


def _check_tree_params(params) -> tuple[int | None, int, int]:
    max_depth = params["max_depth"]
    if max_depth is not None:
        max_depth = int(max_depth)
        if max_depth < 0:
            raise ConfigError(f"max_depth must be >= 0, got {max_depth}")
    mss, msl = int(params["min_samples_split"]), int(params["min_samples_leaf"])
    if mss < 2:
        raise ConfigError(f"min_samples_split must be >= 2, got {mss}")
    if msl < 1:
        raise ConfigError(f"min_samples_leaf must be >= 1, got {msl}")
    return max_depth, mss, msl


@register("DecisionTree",
          {"max_depth": None, "min_samples_split": 2, "min_samples_leaf": 1},
          aliases=("tree", "cart"))
def fit_tree(X, y, params, spec) -> TreeModel:
    max_depth, mss, msl = _check_tree_params(params)
    root = build_tree(X, y, max_depth, mss, msl)
    return TreeModel(spec, root, X.shape[1])
