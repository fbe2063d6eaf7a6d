"""Shared exception types."""


class EmptyGeneratorsNoConstants(ValueError):
    """Closing the empty set needs at least one nullary symbol.

    Without constants the intersection of all subalgebras containing the
    empty set may itself be empty, and empty subalgebras are not allowed.
    """


class BudgetExceeded(RuntimeError):
    """An enumeration or carrier would exceed the configured budget.

    Raised eagerly, never after a partial enumeration: a truncated stream
    would silently corrupt every exhaustive verdict built on top of it.
    """
