"""Exceptions shared across the package."""


class ValidationError(ValueError):
    """A structural condition on a system or one of its parts is violated."""


class BudgetExceededError(RuntimeError):
    """A requested enumeration would exceed the configured point budget."""
