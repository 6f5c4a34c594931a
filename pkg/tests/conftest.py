"""Shared fixtures: a synthetic 440-record dataset and the real-dataset gate.

The synthetic dataset reuses the enumerated scheme space for its feature
columns and fabricates plausible learning curves on top, so every pipeline
stage can be exercised without the published release.  Tests that check
published numbers are gated on the NAAP440_DATASET environment variable and
skip with an explicit reason when it is unset.
"""

import os
from pathlib import Path

import numpy as np
import pytest

from naap440.data import ArchitectureRecord, EpochMetrics, load_dataset, save_records
from naap440.schemes import default_constraint_spec, enumerate_schemes, scheme_features

REAL_DATASET_VAR = "NAAP440_DATASET"


def make_synthetic_records(num_epochs: int = 90) -> list[ArchitectureRecord]:
    """Fabricate learning curves for every scheme in the default space.

    Curves are saturating exponentials whose plateau grows with log parameter
    count, plus small deterministic-seed noise, so targets correlate with the
    structural features the way real training results would.
    """
    spec = default_constraint_spec()
    schemes = enumerate_schemes(spec)
    rng = np.random.default_rng(440)
    records = []
    for i, scheme in enumerate(schemes):
        f = scheme_features(scheme, spec.counting)
        cap = (f.log_num_params - 8.5) / 4.5
        plateau = float(np.clip(
            0.62 + 0.22 * cap + 0.02 * (f.num_stages - 2) + rng.normal(0, 0.008),
            0.3, 0.93))
        tau = 6 + 10 * (1 - cap) + rng.uniform(0, 3)
        epochs = []
        for e in range(num_epochs):
            acc = float(np.clip(
                plateau * (1 - np.exp(-(e + 1) / tau)) * (1 + 0.004 * np.sin(1.7 * e + i))
                + rng.normal(0, 0.003),
                0.05, 0.999))
            mean_loss = max(2.2 * np.exp(-(e + 1) / (1.4 * tau)) + 0.15
                            + rng.normal(0, 0.01), 0.01)
            epochs.append(EpochMetrics(
                test_accuracy=acc,
                mean_train_loss=float(mean_loss),
                median_train_loss=float(max(mean_loss * 0.92, 0.01)),
            ))
        records.append(ArchitectureRecord(
            arch_id=i, features=dict(f.as_dict()), epochs=tuple(epochs)))
    return records


@pytest.fixture(scope="session")
def synthetic_csv(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("data") / "synthetic440.csv"
    save_records(make_synthetic_records(), path)
    return path


@pytest.fixture(scope="session")
def synthetic_records(synthetic_csv):
    return load_dataset(synthetic_csv).records


@pytest.fixture(scope="session")
def real_dataset_path() -> Path:
    """Path to the published release, or skip when it is not available."""
    value = os.environ.get(REAL_DATASET_VAR)
    if not value:
        pytest.skip(f"published dataset not available: set {REAL_DATASET_VAR} "
                    "to the release CSV to run this test")
    path = Path(value)
    if not path.exists():
        pytest.skip(f"{REAL_DATASET_VAR}={value} does not exist")
    return path


@pytest.fixture(scope="session")
def real_records(real_dataset_path):
    return load_dataset(real_dataset_path).records
