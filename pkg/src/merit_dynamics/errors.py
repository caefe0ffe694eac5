"""Exception hierarchy shared across the package."""
from __future__ import annotations


class InvalidParamsError(ValueError):
    """A parameter or state violates a model invariant."""


class DegenerateStateError(ValueError):
    """A state renders the requested computation undefined (e.g. X = 0
    while the over-subscribed allocation formula is requested)."""


class CapacityInfeasibleError(ValueError):
    """Requested seat capacity exceeds the total population."""


class UnsupportedModelError(ValueError):
    """The requested transition model is not covered by this operation."""


class BoundInvalidError(ValueError):
    """An analytic bound is undefined for the supplied inputs, typically
    because the population size is below its validity threshold."""


class NoConvergenceError(RuntimeError):
    """An iterative solve exhausted its iteration budget.

    Carries the best point reached so the caller can diagnose.
    """

    def __init__(self, message: str, last_point=None, residual: float | None = None):
        super().__init__(message)
        self.last_point = last_point
        self.residual = residual
