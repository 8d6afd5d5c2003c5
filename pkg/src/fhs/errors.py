"""Exception classes shared across the package."""


class FhsError(Exception):
    """Base class for library errors."""


class ArgumentError(FhsError, ValueError):
    """An argument is outside the operation's domain."""


class DimensionError(FhsError, ValueError):
    """Sequences of mismatched length were combined."""


class BudgetExceeded(FhsError):
    """An exact computation would exceed the configured enumeration budget."""

    def __init__(self, needed: int, budget: int, what: str = "evaluations"):
        super().__init__(f"exact mode needs {needed} {what}, budget is {budget}; "
                         "raise the budget or use sampling explicitly")
        self.needed = needed
        self.budget = budget


class NotApplicable(FhsError):
    """A certificate method was requested outside its premise."""
