"""Feature matrix assembly, column bookkeeping and normalization."""

import numpy as np
import pytest

from naap440.data import split_train_test
from naap440.errors import ConfigError
from naap440.features import (
    FULL_FEATURES,
    LIMITED_FEATURES,
    FeatureSetConfig,
    Normalizer,
    assemble_features,
    build_design,
)


class TestColumns:
    def test_subset_definitions(self):
        assert LIMITED_FEATURES == ("log_num_params", "num_stages")
        assert FULL_FEATURES == ("depth", "num_stages", "first_layer_width",
                                 "last_layer_width", "log_num_params", "num_macs")
        # raw parameter count stays out of the full set, only its log is used
        assert "num_params" not in FULL_FEATURES

    @pytest.mark.parametrize("config,count", [
        (FeatureSetConfig(preset="limited"), 2),
        (FeatureSetConfig(preset="full"), 6),
        (FeatureSetConfig(preset="full", num_epochs=9), 6 + 27),
        (FeatureSetConfig(preset="none", num_epochs=3), 9),
        (FeatureSetConfig(preset="leave_one_out", dropped="num_macs"), 5),
        (FeatureSetConfig(preset="custom", scheme_features=("num_params",)), 1),
    ])
    def test_column_counts(self, config, count):
        assert len(config.column_names()) == count

    def test_column_order_scheme_then_epochs(self):
        config = FeatureSetConfig(preset="limited", num_epochs=2)
        assert config.column_names() == (
            "log_num_params", "num_stages",
            "epoch1_test_accuracy", "epoch1_mean_train_loss",
            "epoch1_median_train_loss",
            "epoch2_test_accuracy", "epoch2_mean_train_loss",
            "epoch2_median_train_loss",
        )

    def test_leave_one_out_preserves_order(self):
        config = FeatureSetConfig(preset="leave_one_out", dropped="num_stages")
        assert config.resolve_scheme_features() == (
            "depth", "first_layer_width", "last_layer_width",
            "log_num_params", "num_macs")

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            FeatureSetConfig(preset="everything").resolve_scheme_features()

    def test_leave_one_out_requires_known_feature(self):
        with pytest.raises(ConfigError):
            FeatureSetConfig(preset="leave_one_out",
                             dropped="color").resolve_scheme_features()

    def test_custom_requires_known_features(self):
        with pytest.raises(ConfigError):
            FeatureSetConfig(preset="custom",
                             scheme_features=("width",)).resolve_scheme_features()


class TestAssemble:
    def test_values_land_in_named_columns(self, synthetic_records):
        config = FeatureSetConfig(preset="full", num_epochs=2)
        m = assemble_features(synthetic_records[:10], config)
        assert m.X.shape == (10, 12)
        assert m.columns == config.column_names()
        r = synthetic_records[3]
        row = m.X[3]
        assert row[0] == r.features["depth"]
        assert row[4] == r.features["log_num_params"]
        assert row[6] == r.epochs[0].test_accuracy
        assert row[11] == r.epochs[1].median_train_loss
        assert m.y[3] == max(e.test_accuracy for e in r.epochs)
        assert m.ids[3] == r.arch_id

    def test_empty_feature_set_rejected(self, synthetic_records):
        with pytest.raises(ConfigError, match="empty"):
            assemble_features(synthetic_records[:2],
                              FeatureSetConfig(preset="none", num_epochs=0))

    def test_epoch_budget_bounds(self, synthetic_records):
        with pytest.raises(ConfigError):
            assemble_features(synthetic_records[:2],
                              FeatureSetConfig(num_epochs=-1))
        with pytest.raises(ConfigError, match="exceeds"):
            assemble_features(synthetic_records[:2],
                              FeatureSetConfig(num_epochs=91))


class TestNormalizer:
    def test_train_moments(self):
        rng = np.random.default_rng(0)
        X = rng.normal(3.0, 2.5, size=(200, 4))
        Z = Normalizer().fit(X).apply(X)
        np.testing.assert_allclose(Z.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(Z.std(axis=0), 1.0, atol=1e-12)

    def test_population_std(self):
        X = np.array([[0.0], [1.0]])
        norm = Normalizer().fit(X)
        # population std of {0, 1} is 0.5 (the sample std would be ~0.707)
        assert norm.scale[0] == pytest.approx(0.5)

    def test_constant_column_maps_to_zero(self):
        X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
        Z = Normalizer().fit(X).apply(X)
        np.testing.assert_allclose(Z[:, 0], 0.0)
        assert np.all(np.isfinite(Z))

    def test_invertible(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(50, 3)) * [1.0, 10.0, 0.1] + [5.0, -2.0, 0.0]
        norm = Normalizer().fit(X)
        back = norm.apply(X) * norm.scale + norm.mean
        np.testing.assert_allclose(back, X, atol=1e-12)

    def test_must_fit_first(self):
        with pytest.raises(RuntimeError):
            Normalizer().apply(np.zeros((2, 2)))

    def test_column_count_checked(self):
        norm = Normalizer().fit(np.zeros((3, 2)))
        with pytest.raises(ValueError):
            norm.apply(np.zeros((3, 5)))


class TestBuildDesign:
    def test_statistics_come_from_train_only(self, synthetic_records):
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split,
                              FeatureSetConfig(preset="full", num_epochs=3))
        assert design.X_train.shape == (400, 15)
        assert design.X_test.shape == (40, 15)
        np.testing.assert_allclose(design.X_train.mean(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(design.X_train.std(axis=0), 1.0, atol=1e-9)
        # test rows are scaled by train statistics, so they are off-center
        assert np.abs(design.X_test.mean(axis=0)).max() > 1e-6

    def test_targets_stay_in_accuracy_units(self, synthetic_records):
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split,
                              FeatureSetConfig(preset="limited"))
        assert 0.0 < design.y_train.min() and design.y_train.max() <= 1.0
        assert design.target_normalizer is None
        np.testing.assert_array_equal(design.restore_target(design.y_test),
                                      design.y_test)

    def test_standardize_target_round_trips(self, synthetic_records):
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split,
                              FeatureSetConfig(preset="limited"),
                              standardize_target=True)
        assert design.y_train.mean() == pytest.approx(0.0, abs=1e-12)
        assert design.y_train.std() == pytest.approx(1.0, abs=1e-12)
        plain = build_design(synthetic_records, split,
                             FeatureSetConfig(preset="limited"))
        np.testing.assert_allclose(design.restore_target(design.y_test),
                                   plain.y_test, atol=1e-12)

    def test_row_order_follows_split_ids(self, synthetic_records):
        split = split_train_test(synthetic_records)
        design = build_design(synthetic_records, split,
                              FeatureSetConfig(preset="limited"))
        assert design.train_ids == split.train_ids
        assert design.test_ids == split.test_ids

    def test_unknown_ids_rejected(self, synthetic_records):
        from naap440.data import Split

        split = Split(train_ids=(0, 1), test_ids=(99999,))
        with pytest.raises(ConfigError, match="unknown architecture ids"):
            build_design(synthetic_records, split, FeatureSetConfig(preset="limited"))
