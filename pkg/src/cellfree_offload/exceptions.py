"""Exception types raised across the package."""

import numpy as np


class ConfigError(ValueError):
    """A scenario or sweep parameter is missing or out of range."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class InfeasibleError(ValueError):
    """A decision would require an infinite delay (zero rate on a used link)."""


class SingularChannelError(np.linalg.LinAlgError):
    """Estimated channel is rank deficient or too ill-conditioned to invert."""

    def __init__(self, condition_number):
        self.condition_number = float(condition_number)
        super().__init__(f"estimated channel condition number {self.condition_number:.3e} exceeds threshold")


class SolverError(RuntimeError):
    """An iterative solver stopped before meeting its tolerance."""

    def __init__(self, message, residual):
        self.residual = float(residual)
        super().__init__(f"{message} (residual {self.residual:.3e})")


class CapacityError(ValueError):
    """Problem is too large for exhaustive enumeration."""
