"""Experiment orchestration: the baseline grid, both ablations, the
log-feature check and the naive reference row.

Protocol: every (regressor, feature set) cell is run once per seed; the
reported result is the seed whose violation count is the median of the five,
with ties going to the lower MAE and then the lower seed.  Deterministic
families are fit once and their report replicated, which is observationally
identical to rerunning them per seed.

Ensemble rows that differ only in their estimator count share work: estimator
t of a run is seeded by stream(seed, t) regardless of the total count, so the
25-tree forest is literally the first 25 trees of the 200-tree forest.  The
grid exploits that by fitting the largest count once and reading prefix
predictions for the smaller rows.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import ArchitectureRecord, load_dataset, split_train_test
from .errors import ConfigError, ConvergenceError, DataError
from .features import Design, FeatureSetConfig, build_design
from .metrics import EvalReport, acceleration, evaluate, naive_reference
from .regressors import RegressorSpec, fit, is_stochastic
from .regressors.tree import predict_tree

__all__ = [
    "BaselineRow",
    "DEFAULT_BASELINE_ROWS",
    "ExperimentPlan",
    "CellResult",
    "ReportTable",
    "run_cell",
    "run_baseline",
    "run_scheme_ablation",
    "run_epoch_ablation",
    "run_log_feature_check",
    "run_naive",
]

TOTAL_EPOCHS = 90

# canonical feature name -> display name used in report rows
FEATURE_LABELS = {
    "depth": "Depth",
    "num_stages": "NumStages",
    "first_layer_width": "FirstLayerWidth",
    "last_layer_width": "LastLayerWidth",
    "num_params": "NumParams",
    "log_num_params": "LogNumParams",
    "num_macs": "NumMACs",
}


@dataclass(frozen=True)
class BaselineRow:
    """One row of the baseline grid: display label plus regressor template."""

    label: str
    family: str
    params: dict = field(default_factory=dict)

    def template(self) -> RegressorSpec:
        return RegressorSpec(self.family, dict(self.params))


DEFAULT_BASELINE_ROWS: tuple[BaselineRow, ...] = (
    BaselineRow("1-NN", "KNN", {"k": 1}),
    BaselineRow("3-NN", "KNN", {"k": 3}),
    BaselineRow("5-NN", "KNN", {"k": 5}),
    BaselineRow("7-NN", "KNN", {"k": 7}),
    BaselineRow("9-NN", "KNN", {"k": 9}),
    BaselineRow("Linear Regression", "Linear", {"degree": 1.0}),
    BaselineRow("Linear Regression (D=0.5)", "Linear", {"degree": 0.5}),
    BaselineRow("Linear Regression (D=0.25)", "Linear", {"degree": 0.25}),
    BaselineRow("Decision Tree", "DecisionTree", {}),
    BaselineRow("Gradient Boosting (N=25)", "GradientBoosting", {"n_estimators": 25}),
    BaselineRow("Gradient Boosting (N=50)", "GradientBoosting", {"n_estimators": 50}),
    BaselineRow("Gradient Boosting (N=100)", "GradientBoosting", {"n_estimators": 100}),
    BaselineRow("Gradient Boosting (N=200)", "GradientBoosting", {"n_estimators": 200}),
    BaselineRow("AdaBoost (N=25)", "AdaBoost", {"n_estimators": 25}),
    BaselineRow("AdaBoost (N=50)", "AdaBoost", {"n_estimators": 50}),
    BaselineRow("AdaBoost (N=100)", "AdaBoost", {"n_estimators": 100}),
    BaselineRow("AdaBoost (N=200)", "AdaBoost", {"n_estimators": 200}),
    BaselineRow("SVR (RBF kernel)", "SVR", {"kernel": "rbf"}),
    BaselineRow("SVR (Polynomial kernel)", "SVR", {"kernel": "polynomial"}),
    BaselineRow("SVR (Linear kernel)", "SVR", {"kernel": "linear"}),
    BaselineRow("Random Forest (N=25)", "RandomForest", {"n_estimators": 25}),
    BaselineRow("Random Forest (N=50)", "RandomForest", {"n_estimators": 50}),
    BaselineRow("Random Forest (N=100)", "RandomForest", {"n_estimators": 100}),
    BaselineRow("Random Forest (N=200)", "RandomForest", {"n_estimators": 200}),
)

RF200 = RegressorSpec("RandomForest", {"n_estimators": 200})


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything a run needs: data source, rows, seeds, output choices."""

    dataset: str | Path | None = None
    records: tuple[ArchitectureRecord, ...] | None = None
    output_dir: str | Path = "reports"
    formats: tuple[str, ...] = ("csv", "text")
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    epoch_budgets: tuple[int, ...] = (0, 3, 6, 9)
    rows: tuple[BaselineRow, ...] = DEFAULT_BASELINE_ROWS

    def __post_init__(self):
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError(f"seeds must be distinct, got {self.seeds}")
        if not self.seeds or len(self.seeds) % 2 == 0:
            raise ConfigError(
                f"need an odd number of seeds for median selection, got {self.seeds}"
            )
        if any(k < 0 or k > TOTAL_EPOCHS for k in self.epoch_budgets):
            raise ConfigError(f"epoch budgets must lie in [0, {TOTAL_EPOCHS}]")
        labels = [r.label for r in self.rows]
        if len(set(labels)) != len(labels):
            raise ConfigError("baseline row labels must be unique")

    def load_records(self) -> tuple[ArchitectureRecord, ...]:
        if self.records is not None:
            return self.records
        if self.dataset is None:
            raise ConfigError("plan has neither records nor a dataset path")
        return load_dataset(self.dataset).records


@dataclass(frozen=True)
class CellResult:
    """One table cell: per-seed reports plus the median-selected one."""

    row: str
    column: str
    acceleration: float
    seeds: tuple[int, ...]
    seed_reports: tuple[EvalReport, ...]
    selected: EvalReport | None
    selected_seed: int | None
    test_ids: tuple[int, ...]
    y_true: tuple[float, ...]
    y_pred: tuple[float, ...]
    error: str | None = None


@dataclass(frozen=True)
class ReportTable:
    """A rectangular grid of cells, plus the optional naive reference row."""

    name: str
    col_labels: tuple[str, ...]
    row_labels: tuple[str, ...]
    cells: tuple[tuple[CellResult | None, ...], ...]
    naive: EvalReport | None = None

    def cell(self, row: str, col: str) -> CellResult | None:
        return self.cells[self.row_labels.index(row)][self.col_labels.index(col)]

    @property
    def failed_cells(self) -> list[CellResult]:
        return [c for row in self.cells for c in row
                if c is not None and c.error is not None]


def _select_median(reports: list[EvalReport], seeds) -> tuple[EvalReport, int]:
    """Median by violations; equal counts break by lower MAE, then lower seed."""
    by_violations = sorted(r.violations for r in reports)
    median_v = by_violations[len(by_violations) // 2]
    candidates = [i for i, r in enumerate(reports) if r.violations == median_v]
    best = min(candidates, key=lambda i: (reports[i].mae, seeds[i]))
    return reports[best], seeds[best]


def _finish_cell(row: str, col: str, accel: float, seeds, design: Design,
                 preds_by_seed: list[np.ndarray]) -> CellResult:
    y_test = design.restore_target(design.y_test)
    reports = [evaluate(y_test, design.restore_target(p), accel)
               for p in preds_by_seed]
    selected, selected_seed = _select_median(reports, seeds)
    chosen = preds_by_seed[seeds.index(selected_seed)]
    return CellResult(
        row=row, column=col, acceleration=accel, seeds=tuple(seeds),
        seed_reports=tuple(reports), selected=selected,
        selected_seed=selected_seed, test_ids=design.test_ids,
        y_true=tuple(float(v) for v in y_test),
        y_pred=tuple(float(v) for v in design.restore_target(chosen)),
    )


def _error_cell(row: str, col: str, accel: float, seeds, exc: Exception) -> CellResult:
    return CellResult(
        row=row, column=col, acceleration=accel, seeds=tuple(seeds),
        seed_reports=(), selected=None, selected_seed=None,
        test_ids=(), y_true=(), y_pred=(),
        error=f"{type(exc).__name__}: {exc}",
    )


def run_cell(design: Design, template: RegressorSpec, row: str, col: str,
             accel: float, seeds) -> CellResult:
    """Fit and evaluate one cell over all seeds (no cross-row sharing)."""
    try:
        if is_stochastic(template.family):
            preds = [fit(template.with_seed(s), design.X_train,
                         design.y_train).predict(design.X_test) for s in seeds]
        else:
            p = fit(template.with_seed(seeds[0]), design.X_train,
                    design.y_train).predict(design.X_test)
            preds = [p] * len(seeds)
        return _finish_cell(row, col, accel, seeds, design, preds)
    except (ConfigError, DataError, ConvergenceError, ValueError,
            RuntimeError) as exc:
        return _error_cell(row, col, accel, seeds, exc)


def _baseline_config(k: int) -> FeatureSetConfig:
    """Feature rule for the grid: no epochs pairs with the limited scheme set."""
    return FeatureSetConfig("limited" if k == 0 else "full", num_epochs=k)


def _prefix_predictions(family: str, base_params: dict, counts: list[int],
                        seed: int, design: Design) -> dict[int, np.ndarray]:
    """Test predictions for every requested estimator count from one fit.

    Only valid for families whose estimator t is a pure function of
    (seed, t, data): the largest model's first N estimators equal the N-sized
    model exactly.
    """
    top = max(counts)
    spec = RegressorSpec(family, {**base_params, "n_estimators": top}, seed)
    model = fit(spec, design.X_train, design.y_train)
    stage = np.vstack([predict_tree(t, design.X_test) for t in model.trees])
    out: dict[int, np.ndarray] = {}
    if family == "RandomForest":
        cum = np.cumsum(stage, axis=0)
        for n in counts:
            take = min(n, len(model.trees))
            out[n] = cum[take - 1] / take
    elif family == "GradientBoosting":
        cum = np.cumsum(stage, axis=0)
        for n in counts:
            take = min(n, len(model.trees))
            out[n] = model.base + model.learning_rate * cum[take - 1]
    elif family == "AdaBoost":
        for n in counts:
            take = min(n, len(model.trees))
            # weighted median over the first `take` rounds
            preds = stage[:take].T
            order = np.argsort(preds, axis=1)
            cdf = np.cumsum(model.weights[:take][order], axis=1)
            at = cdf >= 0.5 * cdf[:, -1][:, None]
            pick = order[np.arange(len(preds)), at.argmax(axis=1)]
            out[n] = preds[np.arange(len(preds)), pick]
    else:
        raise ConfigError(f"{family} does not support prefix sharing")
    return out


_PREFIX_FAMILIES = ("RandomForest", "GradientBoosting", "AdaBoost")


def run_baseline(plan: ExperimentPlan) -> ReportTable:
    """The full grid: every baseline row at every epoch budget, naive on top."""
    records = plan.load_records()
    split = split_train_test(records)
    col_labels = tuple(f"{k} epochs" for k in plan.epoch_budgets)
    designs = {k: build_design(records, split, _baseline_config(k))
               for k in plan.epoch_budgets}
    first = designs[plan.epoch_budgets[0]]
    naive = naive_reference(first.y_train, first.y_test)

    # rows of prefix-shareable families, grouped by everything but the count
    groups: dict[tuple, list[tuple[int, int]]] = defaultdict(list)
    for r, row in enumerate(plan.rows):
        if row.family in _PREFIX_FAMILIES and "n_estimators" in row.params:
            base = tuple(sorted((k, v) for k, v in row.params.items()
                                if k != "n_estimators"))
            groups[(row.family, base)].append((r, int(row.params["n_estimators"])))

    grid: list[list[CellResult | None]] = [[None] * len(col_labels)
                                           for _ in plan.rows]
    shared_rows = {r for members in groups.values() for r, _ in members}

    for c, k in enumerate(plan.epoch_budgets):
        design = designs[k]
        accel = acceleration(k, TOTAL_EPOCHS)
        for r, row in enumerate(plan.rows):
            if r in shared_rows:
                continue
            grid[r][c] = run_cell(design, row.template(), row.label,
                                  col_labels[c], accel, plan.seeds)
        for (family, base), members in groups.items():
            counts = [n for _, n in members]
            try:
                by_seed = [_prefix_predictions(family, dict(base), counts, s, design)
                           for s in plan.seeds]
                for r, n in members:
                    preds = [per_seed[n] for per_seed in by_seed]
                    grid[r][c] = _finish_cell(plan.rows[r].label, col_labels[c],
                                              accel, plan.seeds, design, preds)
            except (ConfigError, DataError, ConvergenceError, ValueError,
                    RuntimeError) as exc:
                for r, _ in members:
                    grid[r][c] = _error_cell(plan.rows[r].label, col_labels[c],
                                             accel, plan.seeds, exc)

    return ReportTable(
        name="baseline",
        col_labels=col_labels,
        row_labels=tuple(r.label for r in plan.rows),
        cells=tuple(tuple(r) for r in grid),
        naive=naive,
    )


def run_scheme_ablation(plan: ExperimentPlan) -> ReportTable:
    """Scheme-feature ablation at zero epochs with the 200-tree forest."""
    records = plan.load_records()
    split = split_train_test(records)
    rows: list[tuple[str, FeatureSetConfig]] = [
        ("All", FeatureSetConfig("full", 0)),
    ]
    from .features import FULL_FEATURES

    rows += [(f"All but {FEATURE_LABELS[name]}",
              FeatureSetConfig("leave_one_out", 0, dropped=name))
             for name in FULL_FEATURES]
    rows.append(("LogNumParams & NumStages", FeatureSetConfig("limited", 0)))
    accel = acceleration(0, TOTAL_EPOCHS)
    cells = []
    for label, config in rows:
        design = build_design(records, split, config)
        cells.append((run_cell(design, RF200, label, "0 epochs", accel,
                               plan.seeds),))
    return ReportTable(
        name="scheme_ablation",
        col_labels=("0 epochs",),
        row_labels=tuple(label for label, _ in rows),
        cells=tuple(cells),
    )


def run_epoch_ablation(plan: ExperimentPlan) -> ReportTable:
    """Epoch-budget x scheme-subset grid with the 200-tree forest.

    The zero-epoch, zero-feature cell has no inputs at all and stays empty,
    as in the reference table.
    """
    records = plan.load_records()
    split = split_train_test(records)
    budgets = (0, 3, 6, 9, 12, 15, 18)
    subsets = (("0 scheme features", "none"), ("2 scheme features", "limited"),
               ("6 scheme features", "full"))
    grid: list[list[CellResult | None]] = []
    for k in budgets:
        accel = acceleration(k, TOTAL_EPOCHS)
        row: list[CellResult | None] = []
        for col_label, preset in subsets:
            if k == 0 and preset == "none":
                row.append(None)
                continue
            design = build_design(records, split,
                                  FeatureSetConfig(preset, num_epochs=k))
            row.append(run_cell(design, RF200, f"{k} epochs", col_label, accel,
                                plan.seeds))
        grid.append(row)
    return ReportTable(
        name="epoch_ablation",
        col_labels=tuple(label for label, _ in subsets),
        row_labels=tuple(f"{k} epochs" for k in budgets),
        cells=tuple(tuple(r) for r in grid),
    )


def run_log_feature_check(plan: ExperimentPlan) -> ReportTable:
    """Raw versus log parameter count under plain linear regression at k=0."""
    records = plan.load_records()
    split = split_train_test(records)
    rows = [
        ("NumParams & NumStages",
         FeatureSetConfig("custom", 0, scheme_features=("num_params", "num_stages"))),
        ("LogNumParams & NumStages", FeatureSetConfig("limited", 0)),
    ]
    template = RegressorSpec("Linear", {"degree": 1.0})
    accel = acceleration(0, TOTAL_EPOCHS)
    cells = []
    for label, config in rows:
        design = build_design(records, split, config)
        cells.append((run_cell(design, template, label, "0 epochs", accel,
                               plan.seeds),))
    return ReportTable(
        name="log_feature_check",
        col_labels=("0 epochs",),
        row_labels=tuple(label for label, _ in rows),
        cells=tuple(cells),
    )


def run_naive(plan: ExperimentPlan) -> EvalReport:
    """Just the reference row: the constant mean-of-train predictor."""
    records = plan.load_records()
    split = split_train_test(records)
    design = build_design(records, split, FeatureSetConfig("limited", 0))
    return naive_reference(design.y_train, design.y_test)
