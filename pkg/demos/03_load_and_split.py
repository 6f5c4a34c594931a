"""Dataset loading and the deterministic 400/40 split.

Pass the path to the published CSV as the first argument.  Without one the
script fabricates plausible learning curves for all 440 schemes so the split
machinery can still be shown end to end.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from naap440.data import (ArchitectureRecord, EpochMetrics, load_dataset,
                          save_records, split_train_test)
from naap440.schemes import default_constraint_spec, enumerate_schemes, scheme_features


def fabricate(path):
    spec = default_constraint_spec()
    rng = np.random.default_rng(7)
    records = []
    for i, scheme in enumerate(enumerate_schemes(spec)):
        f = scheme_features(scheme, spec.counting)
        plateau = 0.55 + 0.05 * f.log_num_params / 12 + rng.normal(0, 0.02)
        epochs = []
        for e in range(90):
            acc = plateau * (1 - np.exp(-(e + 1) / 9)) + rng.normal(0, 0.003)
            loss = 2.0 * np.exp(-(e + 1) / 12) + 0.2
            epochs.append(EpochMetrics(float(np.clip(acc, 0.05, 0.99)),
                                       float(loss), float(loss * 0.9)))
        records.append(ArchitectureRecord(i, f.as_dict(), tuple(epochs)))
    save_records(records, path)


if len(sys.argv) > 1:
    path = Path(sys.argv[1])
else:
    path = Path(tempfile.gettempdir()) / "naap440_demo.csv"
    print(f"no dataset given, fabricating one at {path}\n")
    fabricate(path)

result = load_dataset(path)
records = result.records
print(f"loaded {len(records)} architectures, "
      f"{len(records[0].epochs)} epochs each")
if result.percent_scaled:
    print("accuracies were given in percent and rescaled to [0, 1]")

targets = {r.arch_id: float(max(r.accuracy_curve())) for r in records}
print(f"target range: {min(targets.values()):.3f} .. {max(targets.values()):.3f}")

split = split_train_test(records)
print(f"\nsplit: {len(split.train_ids)} train / {len(split.test_ids)} test")

# the test set is one architecture from the middle of each accuracy bin,
# so it covers the whole quality range instead of a random slice
ordered = sorted(targets, key=lambda a: (targets[a], a))
first_bin = ordered[:11]
print(f"first bin ids:  {first_bin}")
print(f"its middle id:  {first_bin[5]}, "
      f"in the test set: {first_bin[5] in split.test_ids}")

test_targets = sorted(targets[a] for a in split.test_ids)
print(f"test target span: {test_targets[0]:.3f} .. {test_targets[-1]:.3f}")
