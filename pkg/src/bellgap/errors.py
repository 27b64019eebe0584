"""Exception types shared across the package."""


class BellgapError(Exception):
    """Base class for all package errors."""


class DimensionError(BellgapError, ValueError):
    """Scenario or tensor shapes do not match."""


class DomainError(BellgapError, ValueError):
    """An argument lies outside its mathematical domain."""


class UnsupportedScenario(BellgapError, ValueError):
    """The operation is not defined for this scenario or functional kind."""


class ValidationError(BellgapError, ValueError):
    """An object failed one of its invariant checks."""


class BudgetExceeded(BellgapError, RuntimeError):
    """An enumeration or LP would exceed the configured resource budget."""

    def __init__(self, message: str, required: float, budget: float):
        super().__init__(message)
        self.required = required
        self.budget = budget


class LPError(BellgapError, RuntimeError):
    """A linear program did not terminate at an optimum."""

    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status
