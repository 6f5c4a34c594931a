"""Experiment orchestration: grids, median selection, prefix sharing."""

import math

import numpy as np
import pytest

from naap440.data import split_train_test
from naap440.errors import ConfigError
from naap440.experiments import (
    DEFAULT_BASELINE_ROWS,
    BaselineRow,
    ExperimentPlan,
    _baseline_config,
    _select_median,
    run_baseline,
    run_cell,
    run_epoch_ablation,
    run_log_feature_check,
    run_naive,
    run_scheme_ablation,
)
from naap440.features import build_design
from naap440.metrics import EvalReport, acceleration, naive_reference
from naap440.regressors import RegressorSpec, available_regressors

MINI_ROWS = (
    BaselineRow("1-NN", "KNN", {"k": 1}),
    BaselineRow("Linear Regression", "Linear", {"degree": 1.0}),
    BaselineRow("Random Forest (N=10)", "RandomForest", {"n_estimators": 10}),
    BaselineRow("Random Forest (N=20)", "RandomForest", {"n_estimators": 20}),
    BaselineRow("Gradient Boosting (N=10)", "GradientBoosting", {"n_estimators": 10}),
    BaselineRow("AdaBoost (N=10)", "AdaBoost", {"n_estimators": 10}),
)


@pytest.fixture(scope="module")
def mini_plan(synthetic_records):
    return ExperimentPlan(records=synthetic_records, seeds=(1, 2, 3),
                          epoch_budgets=(0, 3), rows=MINI_ROWS)


@pytest.fixture(scope="module")
def baseline_table(mini_plan):
    return run_baseline(mini_plan)


def report(mae=0.01, violations=40.0, n=40, seed_hint=0):
    pairs = math.comb(n, 2)
    return EvalReport(mae=mae, violations=violations,
                      monotonicity_score=1 - violations / pairs, n=n,
                      acceleration=1.0, num_pairs=pairs, true_ties=False)


class TestDefaultRows:
    def test_twenty_four_rows(self):
        assert len(DEFAULT_BASELINE_ROWS) == 24

    def test_labels_unique(self):
        labels = [r.label for r in DEFAULT_BASELINE_ROWS]
        assert len(set(labels)) == 24

    def test_knn_ladder(self):
        for row, k in zip(DEFAULT_BASELINE_ROWS[:5], (1, 3, 5, 7, 9)):
            assert row.label == f"{k}-NN"
            assert row.family == "KNN" and row.params == {"k": k}

    def test_family_coverage(self):
        families = {r.family for r in DEFAULT_BASELINE_ROWS}
        assert families == {"KNN", "Linear", "DecisionTree", "GradientBoosting",
                            "AdaBoost", "SVR", "RandomForest"}
        assert families <= set(available_regressors())

    def test_ensemble_sizes(self):
        for family, prefix in (("GradientBoosting", "Gradient Boosting"),
                               ("AdaBoost", "AdaBoost"),
                               ("RandomForest", "Random Forest")):
            sizes = [r.params["n_estimators"] for r in DEFAULT_BASELINE_ROWS
                     if r.family == family]
            assert sizes == [25, 50, 100, 200]

    def test_degree_ladder(self):
        degrees = [r.params["degree"] for r in DEFAULT_BASELINE_ROWS
                   if r.family == "Linear"]
        assert degrees == [1.0, 0.5, 0.25]

    def test_svr_kernels(self):
        kernels = [r.params["kernel"] for r in DEFAULT_BASELINE_ROWS
                   if r.family == "SVR"]
        assert kernels == ["rbf", "polynomial", "linear"]


class TestPlanValidation:
    def test_duplicate_seeds_rejected(self, synthetic_records):
        with pytest.raises(ConfigError, match="distinct"):
            ExperimentPlan(records=synthetic_records, seeds=(1, 1, 2))

    def test_even_seed_count_rejected(self, synthetic_records):
        with pytest.raises(ConfigError, match="odd"):
            ExperimentPlan(records=synthetic_records, seeds=(1, 2))

    def test_budget_range_checked(self, synthetic_records):
        with pytest.raises(ConfigError, match="budgets"):
            ExperimentPlan(records=synthetic_records, epoch_budgets=(0, 91))

    def test_duplicate_labels_rejected(self, synthetic_records):
        rows = (BaselineRow("same", "KNN", {"k": 1}),
                BaselineRow("same", "KNN", {"k": 3}))
        with pytest.raises(ConfigError, match="unique"):
            ExperimentPlan(records=synthetic_records, rows=rows)

    def test_source_required(self):
        plan = ExperimentPlan()
        with pytest.raises(ConfigError, match="records"):
            plan.load_records()


class TestMedianSelection:
    def test_median_of_five(self):
        reports = [report(violations=v) for v in (30.0, 10.0, 20.0, 50.0, 40.0)]
        selected, seed = _select_median(reports, (1, 2, 3, 4, 5))
        assert selected.violations == 30.0
        assert seed == 1

    def test_tie_breaks_to_lower_mae(self):
        reports = [report(mae=0.02, violations=10.0),
                   report(mae=0.01, violations=10.0),
                   report(mae=0.05, violations=20.0)]
        selected, seed = _select_median(reports, (1, 2, 3))
        assert selected.mae == 0.01 and seed == 2

    def test_full_tie_breaks_to_lower_seed(self):
        reports = [report(), report(), report()]
        _, seed = _select_median(reports, (7, 3, 5))
        assert seed == 3

    def test_third_order_statistic(self):
        # median by violations ignores mae except on ties
        reports = [report(mae=0.001, violations=100.0),
                   report(mae=0.9, violations=50.0),
                   report(mae=0.5, violations=10.0)]
        selected, _ = _select_median(reports, (1, 2, 3))
        assert selected.violations == 50.0


class TestRunCell:
    def test_deterministic_family_replicates_reports(self, synthetic_records):
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split, _baseline_config(0))
        cell = run_cell(design, RegressorSpec("KNN", {"k": 1}), "1-NN",
                        "0 epochs", 1.0, (1, 2, 3))
        assert cell.error is None
        assert len(set(cell.seed_reports)) == 1
        assert cell.selected_seed == 1
        assert cell.selected == cell.seed_reports[0]

    def test_stochastic_family_median(self, synthetic_records):
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split, _baseline_config(0))
        cell = run_cell(design, RegressorSpec("RandomForest",
                                              {"n_estimators": 10}),
                        "rf", "0 epochs", 1.0, (1, 2, 3))
        assert cell.error is None
        expected, expected_seed = _select_median(list(cell.seed_reports),
                                                 cell.seeds)
        assert cell.selected == expected
        assert cell.selected_seed == expected_seed

    def test_failure_recorded_not_raised(self, synthetic_records):
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split, _baseline_config(0))
        cell = run_cell(design, RegressorSpec("KNN", {"k": 1000}), "bad",
                        "0 epochs", 1.0, (1, 2, 3))
        assert cell.error is not None and "ConfigError" in cell.error
        assert cell.selected is None and cell.seed_reports == ()


class TestBaselineGrid:
    def test_structure(self, mini_plan, baseline_table):
        t = baseline_table
        assert t.name == "baseline"
        assert t.row_labels == tuple(r.label for r in MINI_ROWS)
        assert t.col_labels == ("0 epochs", "3 epochs")
        assert t.naive is not None
        assert t.failed_cells == []
        for row in t.cells:
            for cell in row:
                assert cell is not None and cell.error is None
                assert cell.selected.n == 40

    def test_acceleration_per_column(self, baseline_table):
        for row in baseline_table.cells:
            assert row[0].acceleration == acceleration(0)
            assert row[1].acceleration == acceleration(3)

    def test_feature_rule_keys_off_epoch_budget(self):
        assert _baseline_config(0).preset == "limited"
        for k in (3, 6, 9):
            assert _baseline_config(k).preset == "full"
            assert _baseline_config(k).num_epochs == k

    def test_prefix_sharing_matches_direct_fits(self, synthetic_records,
                                                baseline_table):
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split, _baseline_config(3))
        for label, family, n in (
                ("Random Forest (N=10)", "RandomForest", 10),
                ("Random Forest (N=20)", "RandomForest", 20),
                ("Gradient Boosting (N=10)", "GradientBoosting", 10),
                ("AdaBoost (N=10)", "AdaBoost", 10)):
            direct = run_cell(design, RegressorSpec(family, {"n_estimators": n}),
                              label, "3 epochs", acceleration(3), (1, 2, 3))
            shared = baseline_table.cell(label, "3 epochs")
            assert shared.y_pred == direct.y_pred
            assert shared.seed_reports == direct.seed_reports
            assert shared.selected == direct.selected

    def test_every_cell_beats_naive(self, baseline_table):
        naive = baseline_table.naive
        for row in baseline_table.cells:
            for cell in row:
                assert cell.selected.violations < naive.violations
                assert cell.selected.mae < naive.mae

    def test_deterministic_end_to_end(self, mini_plan, baseline_table):
        assert run_baseline(mini_plan) == baseline_table

    def test_cell_failures_do_not_abort_grid(self, synthetic_records):
        rows = (BaselineRow("ok", "KNN", {"k": 1}),
                BaselineRow("broken", "KNN", {"k": 1000}))
        plan = ExperimentPlan(records=synthetic_records, seeds=(1,),
                              epoch_budgets=(0,), rows=rows)
        table = run_baseline(plan)
        assert table.cell("ok", "0 epochs").error is None
        assert table.cell("broken", "0 epochs").error is not None
        assert len(table.failed_cells) == 1


class TestAblations:
    @pytest.fixture()
    def small_forest(self, monkeypatch):
        monkeypatch.setattr("naap440.experiments.RF200",
                            RegressorSpec("RandomForest", {"n_estimators": 10}))

    def test_scheme_ablation_rows(self, synthetic_records, small_forest):
        plan = ExperimentPlan(records=synthetic_records, seeds=(1,))
        table = run_scheme_ablation(plan)
        assert table.row_labels == (
            "All",
            "All but Depth",
            "All but NumStages",
            "All but FirstLayerWidth",
            "All but LastLayerWidth",
            "All but LogNumParams",
            "All but NumMACs",
            "LogNumParams & NumStages",
        )
        assert table.col_labels == ("0 epochs",)
        assert table.failed_cells == []
        widths = {len(row) for row in table.cells}
        assert widths == {1}

    def test_epoch_ablation_grid(self, synthetic_records, small_forest):
        plan = ExperimentPlan(records=synthetic_records, seeds=(1,))
        table = run_epoch_ablation(plan)
        assert table.row_labels == tuple(
            f"{k} epochs" for k in (0, 3, 6, 9, 12, 15, 18))
        assert table.col_labels == ("0 scheme features", "2 scheme features",
                                    "6 scheme features")
        # the all-empty feature set does not exist as a cell
        assert table.cell("0 epochs", "0 scheme features") is None
        filled = [c for row in table.cells for c in row if c is not None]
        assert len(filled) == 20
        assert all(c.error is None for c in filled)

    def test_log_feature_check_direction(self, synthetic_records):
        plan = ExperimentPlan(records=synthetic_records, seeds=(1,))
        table = run_log_feature_check(plan)
        assert table.row_labels == ("NumParams & NumStages",
                                    "LogNumParams & NumStages")
        raw = table.cell("NumParams & NumStages", "0 epochs").selected
        logged = table.cell("LogNumParams & NumStages", "0 epochs").selected
        assert logged.violations < raw.violations
        assert logged.mae < raw.mae


class TestNaive:
    def test_matches_direct_reference(self, synthetic_records):
        plan = ExperimentPlan(records=synthetic_records)
        report = run_naive(plan)
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split, _baseline_config(0))
        assert report == naive_reference(design.y_train, design.y_test)

    def test_synthetic_targets_are_distinct(self, synthetic_records):
        report = run_naive(ExperimentPlan(records=synthetic_records))
        assert report.true_ties is False
        assert report.violations == 390.0
        assert report.monotonicity_score == pytest.approx(0.5, abs=1e-15)
