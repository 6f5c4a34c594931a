"""Scheme enumeration, features, dataset handling and accuracy-prediction
baselines for the NAAP-440 benchmark."""

from .errors import ConfigError, ConvergenceError, DataError

__version__ = "0.1.0"

__all__ = ["ConfigError", "ConvergenceError", "DataError", "__version__"]
