"""Shared fit/predict contract for all regression families.

Families register themselves under a canonical name with their default
hyperparameters.  ``fit(spec, X, y)`` validates the spec, merges defaults and
dispatches; every returned model exposes ``predict(X) -> np.ndarray`` and
remembers its training dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from ..errors import ConfigError

__all__ = ["RegressorSpec", "FittedModel", "fit", "available_regressors",
           "is_stochastic", "register"]


@dataclass(frozen=True)
class RegressorSpec:
    """One regressor configuration: family, hyperparameters, seed."""

    family: str
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def with_seed(self, seed: int) -> "RegressorSpec":
        return RegressorSpec(self.family, dict(self.params), seed)


class FittedModel:
    """Base for fitted state.  Subclasses implement ``_predict``."""

    def __init__(self, spec: RegressorSpec, num_features: int):
        self.spec = spec
        self.num_features = num_features

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.num_features:
            raise ValueError(
                f"expected a 2-d matrix with {self.num_features} columns, "
                f"got shape {X.shape}"
            )
        out = np.asarray(self._predict(X), dtype=float)
        if not np.isfinite(out).all():
            raise RuntimeError(f"{self.spec.family}: non-finite prediction")
        return out

    def _predict(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


# family -> (fit function, default params, uses randomness)
_REGISTRY: dict[str, tuple[Callable, dict[str, Any], bool]] = {}
_ALIASES: dict[str, str] = {}


def register(family: str, defaults: dict[str, Any], stochastic: bool = False,
             aliases: tuple[str, ...] = ()):
    def wrap(fn):
        _REGISTRY[family] = (fn, defaults, stochastic)
        _ALIASES[family.lower()] = family
        for alias in aliases:
            _ALIASES[alias.lower()] = family
        return fn
    return wrap


def _canonical(family: str) -> str:
    key = family.lower().replace("-", "").replace("_", "").replace(" ", "")
    if key not in _ALIASES:
        raise ConfigError(
            f"unknown regressor family {family!r}; available: "
            f"{sorted(_REGISTRY)}"
        )
    return _ALIASES[key]


def available_regressors() -> dict[str, dict[str, Any]]:
    """Canonical family names with their default hyperparameters."""
    return {name: dict(defaults) for name, (_, defaults, _) in _REGISTRY.items()}


def is_stochastic(family: str) -> bool:
    """Whether the family draws from its seed (ensembles do, the rest do not)."""
    return _REGISTRY[_canonical(family)][2]


def fit(spec: RegressorSpec, X, y) -> FittedModel:
    """Fit one regressor.  Deterministic given (spec, X, y) including the seed."""
    family = _canonical(spec.family)
    fn, defaults, _ = _REGISTRY[family]
    unknown = set(spec.params) - set(defaults)
    if unknown:
        raise ConfigError(
            f"{family}: unknown hyperparameters {sorted(unknown)}; "
            f"known: {sorted(defaults)}"
        )
    params = {**defaults, **dict(spec.params)}
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-d, got shape {X.shape}")
    if y.ndim != 1 or len(y) != X.shape[0]:
        raise ValueError(f"y must be 1-d with len {X.shape[0]}, got shape {y.shape}")
    if X.shape[0] == 0:
        raise ValueError("cannot fit on zero rows")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("training data must be finite")
    canonical_spec = RegressorSpec(family, dict(spec.params), spec.seed)
    return fn(X, y, params, canonical_spec)
