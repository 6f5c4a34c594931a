"""Feature matrix assembly and normalization.

A feature set is a subset of the structural scheme features plus measurements
from the first ``num_epochs`` training epochs.  Matrices keep a fixed column
order: scheme features first (canonical order), then one block of
(test accuracy, mean train loss, median train loss) per included epoch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import ArchitectureRecord, Split, derive_target
from .errors import ConfigError
from .schemes import FEATURE_NAMES

__all__ = [
    "LIMITED_FEATURES",
    "FULL_FEATURES",
    "FeatureSetConfig",
    "FeatureMatrix",
    "assemble_features",
    "Normalizer",
    "build_design",
]

# The two structural subsets used throughout the experiments.  The full set
# keeps the log-transformed parameter count and drops the raw one.
LIMITED_FEATURES = ("log_num_params", "num_stages")
FULL_FEATURES = ("depth", "num_stages", "first_layer_width", "last_layer_width",
                 "log_num_params", "num_macs")


@dataclass(frozen=True)
class FeatureSetConfig:
    """Which columns go into the design matrix.

    ``preset`` picks the structural subset: "limited", "full", "none",
    "leave_one_out" (full minus ``dropped``) or "custom" (exactly
    ``scheme_features``).  ``num_epochs`` adds measurement blocks for the
    first k epochs.
    """

    preset: str = "full"
    num_epochs: int = 0
    dropped: str | None = None
    scheme_features: tuple[str, ...] = ()

    def resolve_scheme_features(self) -> tuple[str, ...]:
        if self.preset == "limited":
            return LIMITED_FEATURES
        if self.preset == "full":
            return FULL_FEATURES
        if self.preset == "none":
            return ()
        if self.preset == "leave_one_out":
            if self.dropped not in FULL_FEATURES:
                raise ConfigError(
                    f"dropped must name one of {FULL_FEATURES}, got {self.dropped!r}"
                )
            return tuple(f for f in FULL_FEATURES if f != self.dropped)
        if self.preset == "custom":
            unknown = [f for f in self.scheme_features if f not in FEATURE_NAMES]
            if unknown:
                raise ConfigError(f"unknown scheme features: {unknown}")
            return tuple(self.scheme_features)
        raise ConfigError(f"unknown preset {self.preset!r}")

    def column_names(self) -> tuple[str, ...]:
        names = list(self.resolve_scheme_features())
        for e in range(1, self.num_epochs + 1):
            names += [f"epoch{e}_test_accuracy", f"epoch{e}_mean_train_loss",
                      f"epoch{e}_median_train_loss"]
        return tuple(names)


@dataclass(frozen=True)
class FeatureMatrix:
    """Design matrix with its column names and aligned targets/ids."""

    X: np.ndarray
    y: np.ndarray
    ids: tuple[int, ...]
    columns: tuple[str, ...]


def assemble_features(records: list[ArchitectureRecord] | tuple[ArchitectureRecord, ...],
                      config: FeatureSetConfig) -> FeatureMatrix:
    """Build the raw (unnormalized) design matrix for ``records``."""
    if config.num_epochs < 0:
        raise ConfigError(f"num_epochs must be >= 0, got {config.num_epochs}")
    scheme_cols = config.resolve_scheme_features()
    if records and config.num_epochs > len(records[0].epochs):
        raise ConfigError(
            f"num_epochs {config.num_epochs} exceeds the {len(records[0].epochs)} "
            f"epochs present in the data"
        )
    if not scheme_cols and config.num_epochs == 0:
        raise ConfigError("feature set is empty (no scheme features, no epochs)")
    rows, y, ids = [], [], []
    for r in records:
        row = [r.features[name] for name in scheme_cols]
        for e in range(config.num_epochs):
            m = r.epochs[e]
            row += [m.test_accuracy, m.mean_train_loss, m.median_train_loss]
        rows.append(row)
        y.append(derive_target(r))
        ids.append(r.arch_id)
    X = np.array(rows, dtype=float).reshape(len(records), len(config.column_names()))
    return FeatureMatrix(X=X, y=np.array(y, dtype=float), ids=tuple(ids),
                         columns=config.column_names())


@dataclass
class Normalizer:
    """Per-column z-scoring with statistics learned from the training rows.

    Uses the population standard deviation; constant columns get scale 1 so
    they map to zero instead of dividing by zero.
    """

    mean: np.ndarray | None = None
    scale: np.ndarray | None = None

    def fit(self, X: np.ndarray) -> "Normalizer":
        self.mean = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale = np.where(std > 0, std, 1.0)
        return self

    def apply(self, X: np.ndarray) -> np.ndarray:
        if self.mean is None:
            raise RuntimeError("normalizer must be fit before use")
        if X.shape[1] != self.mean.shape[0]:
            raise ValueError(
                f"expected {self.mean.shape[0]} columns, got {X.shape[1]}"
            )
        return (X - self.mean) / self.scale


@dataclass(frozen=True)
class Design:
    """Normalized train/test matrices ready for a regressor."""

    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    train_ids: tuple[int, ...]
    test_ids: tuple[int, ...]
    columns: tuple[str, ...]
    normalizer: Normalizer
    target_normalizer: Normalizer | None = None

    def restore_target(self, y: np.ndarray) -> np.ndarray:
        if self.target_normalizer is None:
            return y
        tn = self.target_normalizer
        return y * tn.scale[0] + tn.mean[0]


def build_design(records: list[ArchitectureRecord] | tuple[ArchitectureRecord, ...],
                 split: Split, config: FeatureSetConfig,
                 standardize_target: bool = False) -> Design:
    """Assemble, split and normalize in one step.

    Normalization statistics come from the training rows only.  Targets are
    left in accuracy units unless ``standardize_target`` is set, in which case
    ``restore_target`` undoes the transform on predictions.
    """
    by_id = {r.arch_id: r for r in records}
    missing = [i for i in (*split.train_ids, *split.test_ids) if i not in by_id]
    if missing:
        raise ConfigError(f"split references unknown architecture ids: {missing[:5]}")
    train = assemble_features([by_id[i] for i in split.train_ids], config)
    test = assemble_features([by_id[i] for i in split.test_ids], config)
    norm = Normalizer().fit(train.X)
    y_train, y_test = train.y, test.y
    target_norm = None
    if standardize_target:
        target_norm = Normalizer().fit(train.y.reshape(-1, 1))
        y_train = target_norm.apply(train.y.reshape(-1, 1)).ravel()
        y_test = target_norm.apply(test.y.reshape(-1, 1)).ravel()
    return Design(
        X_train=norm.apply(train.X), y_train=y_train,
        X_test=norm.apply(test.X), y_test=y_test,
        train_ids=train.ids, test_ids=test.ids,
        columns=train.columns, normalizer=norm, target_normalizer=target_norm,
    )
