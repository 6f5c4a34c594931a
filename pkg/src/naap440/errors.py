"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration (bad candidate set, unknown feature name, ...)."""


class DataError(ValueError):
    """Input data violates the dataset contract (wrong row count, bad cell, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message: str, *, kkt_violation: float | None = None,
                 duality_gap: float | None = None):
        super().__init__(message)
        self.kkt_violation = kkt_violation
        self.duality_gap = duality_gap
