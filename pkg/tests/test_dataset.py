"""Dataset loading, column resolution, target derivation and the split."""

import numpy as np
import pandas as pd
import pytest

from naap440.data import (
    ArchitectureRecord,
    ColumnMapping,
    EpochMetrics,
    Split,
    derive_target,
    load_dataset,
    load_split,
    save_records,
    save_split,
    split_train_test,
)
from naap440.errors import DataError
from naap440.schemes import FEATURE_NAMES


def make_record(arch_id: int, accs, losses=None) -> ArchitectureRecord:
    losses = losses or [0.5] * len(accs)
    features = {name: float(arch_id + j) for j, name in enumerate(FEATURE_NAMES)}
    epochs = tuple(EpochMetrics(a, l, l * 0.9) for a, l in zip(accs, losses))
    return ArchitectureRecord(arch_id=arch_id, features=features, epochs=epochs)


def write_csv(tmp_path, records, name="data.csv"):
    path = tmp_path / name
    save_records(records, path)
    return path


class TestLoad:
    def test_round_trip_identity(self, tmp_path):
        original = [make_record(0, [0.1, 0.5, 0.4]), make_record(7, [0.2, 0.3, 0.9])]
        path = write_csv(tmp_path, original)
        result = load_dataset(path, expected_count=2, expected_epochs=3)
        assert not result.percent_scaled
        assert result.records == tuple(original)

    def test_synthetic_shape(self, synthetic_records):
        assert len(synthetic_records) == 440
        assert all(len(r.epochs) == 90 for r in synthetic_records)
        assert all(set(r.features) == set(FEATURE_NAMES) for r in synthetic_records)

    def test_row_count_checked(self, tmp_path):
        path = write_csv(tmp_path, [make_record(i, [0.5]) for i in range(3)])
        with pytest.raises(DataError, match="expected 440 rows"):
            load_dataset(path, expected_epochs=1)
        with pytest.raises(DataError, match="expected 2 rows"):
            load_dataset(path, expected_count=2, expected_epochs=1)

    def test_epoch_count_checked(self, tmp_path):
        path = write_csv(tmp_path, [make_record(0, [0.5, 0.6])])
        with pytest.raises(DataError, match="expected 90 epochs"):
            load_dataset(path, expected_count=1)
        load_dataset(path, expected_count=1, expected_epochs=None)

    def test_percent_scaled_accuracies(self, tmp_path):
        records = [make_record(0, [0.12, 0.56]), make_record(1, [0.33, 0.72])]
        path = write_csv(tmp_path, records)
        df = pd.read_csv(path)
        for col in df.columns:
            if "test_accuracy" in col:
                df[col] *= 100.0
        scaled_path = tmp_path / "percent.csv"
        df.to_csv(scaled_path, index=False)

        result = load_dataset(scaled_path, expected_count=2, expected_epochs=2)
        assert result.percent_scaled
        for got, want in zip(result.records, records):
            np.testing.assert_allclose(got.accuracy_curve(), want.accuracy_curve(),
                                       rtol=0, atol=1e-12)

    def test_missing_feature_column(self, tmp_path):
        path = write_csv(tmp_path, [make_record(0, [0.5])])
        df = pd.read_csv(path).drop(columns=["num_stages"])
        bad = tmp_path / "missing.csv"
        df.to_csv(bad, index=False)
        with pytest.raises(DataError, match="num_stages"):
            load_dataset(bad, expected_count=1, expected_epochs=1)

    def test_ambiguous_feature_column(self, tmp_path):
        path = write_csv(tmp_path, [make_record(0, [0.5])])
        df = pd.read_csv(path)
        df["params"] = df["num_params"]
        bad = tmp_path / "ambiguous.csv"
        df.to_csv(bad, index=False)
        with pytest.raises(DataError, match="ambiguous"):
            load_dataset(bad, expected_count=1, expected_epochs=1)

    def test_non_numeric_cell_named(self, tmp_path):
        path = write_csv(tmp_path, [make_record(0, [0.5]), make_record(1, [0.6])])
        df = pd.read_csv(path).astype(object)
        df.loc[1, "depth"] = "deep"
        bad = tmp_path / "text.csv"
        df.to_csv(bad, index=False)
        with pytest.raises(DataError, match=r"row 1.*depth"):
            load_dataset(bad, expected_count=2, expected_epochs=1)

    def test_accuracy_range_checked(self, tmp_path):
        # 1.4 is above any accuracy fraction but below the percent threshold
        path = write_csv(tmp_path, [make_record(0, [1.4])])
        with pytest.raises(DataError, match="outside"):
            load_dataset(path, expected_count=1, expected_epochs=1)

    def test_duplicate_ids_rejected(self, tmp_path):
        records = [make_record(3, [0.5]), make_record(3, [0.6])]
        path = write_csv(tmp_path, records)
        with pytest.raises(DataError, match="unique"):
            load_dataset(path, expected_count=2, expected_epochs=1)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_dataset(tmp_path / "absent.csv")

    def test_alternate_spellings(self, tmp_path):
        # epoch numbering from zero plus short metric names
        row = {"Arch ID": 4, "Depth": 3, "Num Stages": 2, "First Layer Width": 8,
               "Last Layer Width": 32, "Parameters": 6418,
               "Log Num Params": 8.77, "MACs": 424256}
        for e in range(2):
            row[f"acc{e}"] = 0.5 + 0.1 * e
            row[f"mean_loss{e}"] = 1.0
            row[f"median_loss{e}"] = 0.9
        path = tmp_path / "spellings.csv"
        pd.DataFrame([row]).to_csv(path, index=False)
        result = load_dataset(path, expected_count=1, expected_epochs=2)
        record = result.records[0]
        assert record.arch_id == 4
        assert record.features["num_params"] == 6418
        assert record.epochs[1].test_accuracy == pytest.approx(0.6)

    def test_gap_in_epoch_numbering(self, tmp_path):
        path = write_csv(tmp_path, [make_record(0, [0.5, 0.6, 0.7])])
        df = pd.read_csv(path).drop(columns=[
            "epoch2_test_accuracy", "epoch2_mean_train_loss",
            "epoch2_median_train_loss"])
        bad = tmp_path / "gap.csv"
        df.to_csv(bad, index=False)
        with pytest.raises(DataError, match="contiguous"):
            load_dataset(bad, expected_count=1, expected_epochs=2)

    def test_colliding_headers(self):
        with pytest.raises(DataError, match="collide"):
            ColumnMapping.resolve(["depth", "De_pth"])


class TestTarget:
    def test_target_is_curve_maximum(self):
        record = make_record(0, [0.2, 0.9, 0.4, 0.85])
        assert derive_target(record) == pytest.approx(0.9)

    def test_target_matches_numpy_oracle(self, synthetic_records):
        for r in synthetic_records[::37]:
            assert derive_target(r) == pytest.approx(float(r.accuracy_curve().max()),
                                                     abs=0)

    def test_empty_curve_rejected(self):
        record = ArchitectureRecord(arch_id=0, features={}, epochs=())
        with pytest.raises(DataError):
            derive_target(record)


class TestSplit:
    def test_sizes(self, synthetic_records):
        split = split_train_test(synthetic_records)
        assert len(split.train_ids) == 400
        assert len(split.test_ids) == 40

    def test_partition(self, synthetic_records):
        split = split_train_test(synthetic_records)
        all_ids = {r.arch_id for r in synthetic_records}
        assert set(split.train_ids) | set(split.test_ids) == all_ids
        assert not set(split.train_ids) & set(split.test_ids)

    def test_central_pick_on_known_targets(self):
        # targets 0.001 * id make the sorted order equal the id order, so the
        # test picks are exactly ranks 5, 16, 27, ... (index 5 in each bin of 11)
        records = [make_record(i, [0.001 * i]) for i in range(440)]
        split = split_train_test(records)
        assert split.test_ids == tuple(11 * b + 5 for b in range(40))

    def test_tie_break_by_id(self):
        # all targets equal: sorting falls back to id, same picks as above
        records = [make_record(i, [0.5]) for i in range(440)]
        split = split_train_test(records)
        assert split.test_ids == tuple(11 * b + 5 for b in range(40))

    def test_order_invariance(self, synthetic_records):
        baseline = split_train_test(synthetic_records)
        rng = np.random.default_rng(7)
        shuffled = list(synthetic_records)
        rng.shuffle(shuffled)
        assert split_train_test(shuffled) == baseline

    def test_pick_index_moves_selection(self):
        records = [make_record(i, [0.001 * i]) for i in range(440)]
        split = split_train_test(records, pick_index=0)
        assert split.test_ids == tuple(11 * b for b in range(40))

    def test_indivisible_count_rejected(self):
        records = [make_record(i, [0.5]) for i in range(439)]
        with pytest.raises(DataError, match="equal bins"):
            split_train_test(records)

    def test_pick_index_range_checked(self):
        records = [make_record(i, [0.5]) for i in range(440)]
        with pytest.raises(DataError, match="pick_index"):
            split_train_test(records, pick_index=11)

    def test_overlap_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            Split(train_ids=(1, 2), test_ids=(2, 3))

    def test_save_load_round_trip(self, synthetic_records, tmp_path):
        split = split_train_test(synthetic_records)
        path = tmp_path / "split.json"
        save_split(split, path)
        assert load_split(path) == split

    def test_load_split_rejects_malformed(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\"train_ids\": [1]}")
        with pytest.raises(DataError):
            load_split(path)


class TestSaveRecords:
    def test_empty_rejected(self, tmp_path):
        with pytest.raises(DataError):
            save_records([], tmp_path / "x.csv")

    def test_synthetic_round_trip(self, synthetic_csv, synthetic_records, tmp_path):
        path = tmp_path / "again.csv"
        save_records(synthetic_records, path)
        reloaded = load_dataset(path).records
        assert reloaded == tuple(synthetic_records)
