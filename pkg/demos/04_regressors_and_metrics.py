"""Fit every regression family on one toy problem and score the rankings.

The interesting metric here is not absolute error but pair ordering: a
predictor that ranks candidate networks correctly is useful even when its
absolute accuracy estimates are off.
"""

import numpy as np

from naap440.metrics import count_violations, evaluate, mae, monotonicity_score
from naap440.regressors import RegressorSpec, fit

rng = np.random.default_rng(3)
X = rng.uniform(-2, 2, size=(240, 3))
# accuracy-like targets, kept strictly positive for the root-transform family
y = 0.6 + 0.2 * np.tanh(X[:, 0]) - 0.05 * X[:, 1] ** 2 + 0.05 * X[:, 2]
y += rng.normal(0, 0.01, len(y))
X_train, y_train = X[:200], y[:200]
X_test, y_test = X[200:], y[200:]

specs = [
    RegressorSpec("KNN", {"k": 5}),
    RegressorSpec("Linear", {"degree": 1.0}),
    RegressorSpec("Linear", {"degree": 0.5}),
    RegressorSpec("DecisionTree", {}),
    RegressorSpec("RandomForest", {"n_estimators": 50}, seed=1),
    RegressorSpec("GradientBoosting", {"n_estimators": 50}),
    RegressorSpec("AdaBoost", {"n_estimators": 50}, seed=1),
    RegressorSpec("SVR", {"kernel": "rbf"}),
]

print(f"{'family':38s} {'MAE':>8s} {'score':>7s} {'viol':>6s}")
for spec in specs:
    model = fit(spec, X_train, y_train)
    pred = model.predict(X_test)
    report = evaluate(y_test, pred)
    label = spec.family + (f" {spec.params}" if spec.params else "")
    print(f"{label:38s} {report.mae:8.4f} {report.monotonicity_score:7.3f} "
          f"{report.violations:6g}")

# the score is insensitive to any monotone rescaling of the predictions
pred = fit(specs[0], X_train, y_train).predict(X_test)
print(f"\nscore(pred):          {monotonicity_score(y_test, pred):.4f}")
print(f"score(2*pred - 1):    {monotonicity_score(y_test, 2 * pred - 1):.4f}")
print(f"score(tanh(pred)):    {monotonicity_score(y_test, np.tanh(pred)):.4f}")

# ties cost half a violation; a constant predictor sits exactly at 0.5
constant = np.full_like(y_test, y_train.mean())
print(f"\nconstant predictor: mae {mae(y_test, constant):.4f}, "
      f"violations {count_violations(y_test, constant):g}, "
      f"score {monotonicity_score(y_test, constant):.3f}")
