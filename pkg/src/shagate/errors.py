"""Exception types shared across the package."""

from __future__ import annotations


class ShagateError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(ShagateError, ValueError):
    """An input lies outside the family an operation is defined for."""


class NotSquarefree(PreconditionError):
    pass


class FactorizationError(ShagateError, RuntimeError):
    """Pollard rho ran out of budget before splitting a composite."""


class NotANorm(PreconditionError):
    """The requested divisor is not a norm, so the norm equation has no solution."""


class SearchBudgetExceeded(ShagateError, RuntimeError):
    """A bounded Diophantine search hit its ceiling without finding a solution."""

    def __init__(self, equation: str, bound: int):
        super().__init__(f"no primitive solution of {equation} with c <= {bound}")
        self.equation = equation
        self.bound = bound


class InternalConsistencyError(ShagateError, AssertionError):
    """Two routes that must agree did not. Always a bug, never user error."""
