"""Dataset loading, target derivation and the deterministic train/test split.

The published release is a single CSV with one row per architecture: structural
features plus per-epoch measurements (test accuracy, mean train loss, median
train loss).  Header spellings vary across releases, so column resolution is
candidate-pattern based rather than hard-coded.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import DataError
from .schemes import FEATURE_NAMES

__all__ = [
    "EpochMetrics",
    "ArchitectureRecord",
    "ColumnMapping",
    "LoadResult",
    "load_dataset",
    "derive_target",
    "Split",
    "split_train_test",
    "save_split",
    "load_split",
    "save_records",
]

EPOCH_METRIC_NAMES = ("test_accuracy", "mean_train_loss", "median_train_loss")


@dataclass(frozen=True)
class EpochMetrics:
    """Measurements captured at the end of one training epoch."""

    test_accuracy: float
    mean_train_loss: float
    median_train_loss: float


@dataclass(frozen=True)
class ArchitectureRecord:
    """One trained architecture: id, structural features, learning curves."""

    arch_id: int
    features: dict[str, float]
    epochs: tuple[EpochMetrics, ...]

    def accuracy_curve(self) -> np.ndarray:
        return np.array([e.test_accuracy for e in self.epochs])


def _normalize(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


# Candidate spellings per canonical feature column, compared after
# normalization (lowercase, punctuation stripped).
_FEATURE_CANDIDATES: dict[str, tuple[str, ...]] = {
    "depth": ("depth", "numlayers", "nlayers"),
    "num_stages": ("numstages", "stages", "nstages"),
    "first_layer_width": ("firstlayerwidth", "firstwidth"),
    "last_layer_width": ("lastlayerwidth", "lastwidth"),
    "num_params": ("numparams", "parameters", "params", "nparams"),
    "log_num_params": ("lognumparams", "logparams"),
    "num_macs": ("nummacs", "macs", "nmacs", "flops", "numflops"),
}

_ID_CANDIDATES = ("id", "archid", "architectureid", "index", "scheme", "architecture")

# Per epoch metric, regexes with one integer group for the epoch number.
_EPOCH_PATTERNS: dict[str, tuple[str, ...]] = {
    "test_accuracy": (
        r"^epoch(\d+)testaccuracy$",
        r"^testaccuracy(\d+)$",
        r"^epoch(\d+)accuracy$",
        r"^accuracy(\d+)$",
        r"^epoch(\d+)acc$",
        r"^acc(\d+)$",
    ),
    "mean_train_loss": (
        r"^epoch(\d+)meantrainloss$",
        r"^meantrainloss(\d+)$",
        r"^epoch(\d+)meanloss$",
        r"^meanloss(\d+)$",
    ),
    "median_train_loss": (
        r"^epoch(\d+)mediantrainloss$",
        r"^mediantrainloss(\d+)$",
        r"^epoch(\d+)medianloss$",
        r"^medianloss(\d+)$",
    ),
}


@dataclass
class ColumnMapping:
    """Resolved mapping from canonical names to CSV columns."""

    features: dict[str, str]
    epochs: dict[str, list[str]]  # metric -> columns ordered by epoch
    id_column: str | None = None
    num_epochs: int = 0

    @classmethod
    def resolve(cls, columns: list[str]) -> "ColumnMapping":
        """Match CSV headers against candidate spellings and epoch patterns.

        Raises DataError naming the offending canonical column when a feature
        is missing or matched by several CSV columns.
        """
        normalized = {_normalize(c): c for c in columns}
        if len(normalized) != len(columns):
            seen: dict[str, str] = {}
            for c in columns:
                n = _normalize(c)
                if n in seen:
                    raise DataError(f"columns {seen[n]!r} and {c!r} collide after normalization")
                seen[n] = c

        features: dict[str, str] = {}
        for canonical, candidates in _FEATURE_CANDIDATES.items():
            hits = [normalized[c] for c in candidates if c in normalized]
            if not hits:
                raise DataError(f"no column found for feature {canonical!r}")
            if len(hits) > 1:
                raise DataError(f"feature {canonical!r} is ambiguous: matches {hits}")
            features[canonical] = hits[0]

        id_hits = [normalized[c] for c in _ID_CANDIDATES if c in normalized]
        if len(id_hits) > 1:
            raise DataError(f"id column is ambiguous: matches {id_hits}")
        id_column = id_hits[0] if id_hits else None

        epochs: dict[str, list[str]] = {}
        counts = set()
        for metric, patterns in _EPOCH_PATTERNS.items():
            by_epoch: dict[int, str] = {}
            for pattern in patterns:
                rx = re.compile(pattern)
                found = {}
                for norm, original in normalized.items():
                    m = rx.match(norm)
                    if m:
                        epoch = int(m.group(1))
                        if epoch in found:
                            raise DataError(
                                f"{metric}: columns {found[epoch]!r} and {original!r} "
                                f"both claim epoch {epoch}"
                            )
                        found[epoch] = original
                if found:
                    by_epoch = found
                    break
            if not by_epoch:
                raise DataError(f"no columns found for epoch metric {metric!r}")
            lo, hi = min(by_epoch), max(by_epoch)
            if lo not in (0, 1) or set(by_epoch) != set(range(lo, hi + 1)):
                raise DataError(f"{metric}: epoch numbers are not contiguous from 0 or 1")
            epochs[metric] = [by_epoch[e] for e in sorted(by_epoch)]
            counts.add(len(by_epoch))
        if len(counts) != 1:
            raise DataError(f"epoch metrics disagree on epoch count: {sorted(counts)}")

        return cls(features=features, epochs=epochs, id_column=id_column,
                   num_epochs=counts.pop())


@dataclass(frozen=True)
class LoadResult:
    """Loaded records plus load-time findings."""

    records: tuple[ArchitectureRecord, ...]
    mapping: ColumnMapping
    percent_scaled: bool


def _cell(df_row, column: str, row_index: int) -> float:
    value = df_row[column]
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DataError(f"row {row_index}, column {column!r}: not numeric ({value!r})")
    if not np.isfinite(value):
        raise DataError(f"row {row_index}, column {column!r}: not finite ({value!r})")
    return value


def load_dataset(path: str | Path, column_mapping: ColumnMapping | None = None,
                 expected_count: int | None = 440,
                 expected_epochs: int | None = 90) -> LoadResult:
    """Load the tabular release at ``path``.

    Accuracies recorded as percentages (any value above 1.5) are detected and
    the whole accuracy block is scaled by 1/100 so downstream code always sees
    fractions.  Row and epoch counts are checked against ``expected_count``
    and ``expected_epochs`` (pass None to accept any size).  A mapping is
    resolved from the header unless one is supplied.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except Exception as exc:
        raise DataError(f"could not parse {path}: {exc}") from exc
    if expected_count is not None and len(df) != expected_count:
        raise DataError(f"{path}: expected {expected_count} rows, found {len(df)}")
    mapping = column_mapping or ColumnMapping.resolve(list(df.columns))
    if expected_epochs is not None and mapping.num_epochs != expected_epochs:
        raise DataError(
            f"{path}: expected {expected_epochs} epochs per record, "
            f"found {mapping.num_epochs}"
        )

    acc_cols = mapping.epochs["test_accuracy"]
    acc_max = float(df[acc_cols].to_numpy(dtype=float).max())
    percent_scaled = acc_max > 1.5
    scale = 0.01 if percent_scaled else 1.0

    records = []
    for i, (_, row) in enumerate(df.iterrows()):
        arch_id = int(_cell(row, mapping.id_column, i)) if mapping.id_column else i
        feats = {name: _cell(row, col, i) for name, col in mapping.features.items()}
        epochs = []
        for e in range(mapping.num_epochs):
            acc = _cell(row, mapping.epochs["test_accuracy"][e], i) * scale
            if not 0.0 <= acc <= 1.0 + 1e-9:
                raise DataError(
                    f"row {i}: test accuracy {acc} outside [0, 1] after scaling"
                )
            epochs.append(EpochMetrics(
                test_accuracy=acc,
                mean_train_loss=_cell(row, mapping.epochs["mean_train_loss"][e], i),
                median_train_loss=_cell(row, mapping.epochs["median_train_loss"][e], i),
            ))
        records.append(ArchitectureRecord(arch_id=arch_id, features=feats,
                                          epochs=tuple(epochs)))
    ids = [r.arch_id for r in records]
    if len(set(ids)) != len(ids):
        raise DataError("architecture ids are not unique")
    return LoadResult(records=tuple(records), mapping=mapping,
                      percent_scaled=percent_scaled)


def derive_target(record: ArchitectureRecord) -> float:
    """Prediction target: the maximal test accuracy across all epochs."""
    if not record.epochs:
        raise DataError(f"architecture {record.arch_id} has no epoch measurements")
    return max(e.test_accuracy for e in record.epochs)


@dataclass(frozen=True)
class Split:
    """A train/test partition by architecture id."""

    train_ids: tuple[int, ...]
    test_ids: tuple[int, ...]

    def __post_init__(self):
        overlap = set(self.train_ids) & set(self.test_ids)
        if overlap:
            raise ValueError(f"train and test overlap: {sorted(overlap)[:5]}")


def split_train_test(records: tuple[ArchitectureRecord, ...] | list[ArchitectureRecord],
                     num_bins: int = 40, pick_index: int = 5) -> Split:
    """Deterministic stratified split.

    Records are sorted by (target, id) ascending and cut into ``num_bins``
    equal consecutive bins; the record at ``pick_index`` (zero-based) inside
    each bin goes to the test set.  With 440 records and the defaults this
    yields the canonical 400/40 partition.
    """
    n = len(records)
    if n == 0 or n % num_bins != 0:
        raise DataError(f"cannot cut {n} records into {num_bins} equal bins")
    bin_size = n // num_bins
    if not 0 <= pick_index < bin_size:
        raise DataError(f"pick_index {pick_index} outside [0, {bin_size})")
    ranked = sorted(records, key=lambda r: (derive_target(r), r.arch_id))
    test, train = [], []
    for b in range(num_bins):
        for j in range(bin_size):
            record = ranked[b * bin_size + j]
            (test if j == pick_index else train).append(record.arch_id)
    return Split(train_ids=tuple(sorted(train)), test_ids=tuple(sorted(test)))


def save_split(split: Split, path: str | Path) -> None:
    payload = {"train_ids": list(split.train_ids), "test_ids": list(split.test_ids)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_split(path: str | Path) -> Split:
    try:
        raw = json.loads(Path(path).read_text())
        return Split(train_ids=tuple(raw["train_ids"]), test_ids=tuple(raw["test_ids"]))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: not a valid split file ({exc})") from exc


def save_records(records: tuple[ArchitectureRecord, ...] | list[ArchitectureRecord],
                 path: str | Path) -> None:
    """Write records back to CSV in canonical column spelling.

    The output round-trips through :func:`load_dataset`.
    """
    if not records:
        raise DataError("nothing to save")
    num_epochs = len(records[0].epochs)
    rows = []
    for r in records:
        row: dict[str, float] = {"id": r.arch_id}
        for name in FEATURE_NAMES:
            row[name] = r.features[name]
        for e, metrics in enumerate(r.epochs, start=1):
            row[f"epoch{e}_test_accuracy"] = metrics.test_accuracy
            row[f"epoch{e}_mean_train_loss"] = metrics.mean_train_loss
            row[f"epoch{e}_median_train_loss"] = metrics.median_train_loss
        rows.append(row)
    # shortest round-trip float spelling, so load_dataset(save_records(x)) == x
    pd.DataFrame(rows).to_csv(path, index=False,
                              float_format=lambda v: repr(float(v)))
