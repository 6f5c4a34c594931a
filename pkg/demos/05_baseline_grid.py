"""Run a small baseline grid end to end and print the report table.

Uses the fabricated dataset from demo 03 (or a real CSV given as argv[1]).
Each cell fits one regressor per seed, evaluates on the held-out bin picks,
and keeps the median seed by violation count.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from naap440.experiments import BaselineRow, ExperimentPlan, run_baseline
from naap440.reports import render_text

if len(sys.argv) > 1:
    dataset = Path(sys.argv[1])
else:
    dataset = Path(tempfile.gettempdir()) / "naap440_demo.csv"
    if not dataset.exists():
        here = Path(__file__).parent
        subprocess.run([sys.executable, str(here / "03_load_and_split.py")],
                       check=True, stdout=subprocess.DEVNULL)

rows = (
    BaselineRow("1-NN", "KNN", {"k": 1}),
    BaselineRow("5-NN", "KNN", {"k": 5}),
    BaselineRow("Linear Regression", "Linear", {"degree": 1.0}),
    BaselineRow("Decision Tree", "DecisionTree", {}),
    BaselineRow("Random Forest (N=50)", "RandomForest", {"n_estimators": 50}),
    BaselineRow("Gradient Boosting (N=50)", "GradientBoosting",
                {"n_estimators": 50}),
)
plan = ExperimentPlan(dataset=str(dataset), seeds=(1, 2, 3),
                      epoch_budgets=(0, 3, 9), rows=rows)

table = run_baseline(plan)
print(render_text(table))

cell = table.cell("Random Forest (N=50)", "9 epochs")
print(f"per-seed violations for the forest at 9 epochs: "
      f"{[r.violations for r in cell.seed_reports]}")
print(f"kept seed {cell.selected_seed} (median by violations)")
print(f"acceleration at 9 of 90 epochs: {cell.acceleration:.0%}")
