"""Regression baselines implemented from first principles on numpy.

Every family registers under a short name and is driven through the same
``fit(spec, X, y) -> FittedModel`` entry point; see :mod:`naap440.regressors.base`.
"""

from .base import (FittedModel, RegressorSpec, available_regressors, fit,
                   is_stochastic)
from .linear import fit_linear_degree
from .seeding import stream
from .svr import fit_svr

from . import adaboost, forest, gboost, knn, tree  # noqa: F401  (registration)

__all__ = ["FittedModel", "RegressorSpec", "available_regressors", "fit",
           "fit_linear_degree", "fit_svr", "is_stochastic", "stream"]
