"""Exception types shared across the package."""

from __future__ import annotations


class ExminorsError(Exception):
    """Base class for all package errors."""


class InputError(ExminorsError, ValueError):
    """Malformed or inconsistent input. ``offset`` locates the problem when known."""

    def __init__(self, message: str, offset: int | None = None) -> None:
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class BudgetExceeded(ExminorsError):
    """A search ran out of budget before reaching a verdict."""

    def __init__(self, message: str, partial=None) -> None:
        super().__init__(message)
        self.partial = partial


class PreconditionError(ExminorsError, ValueError):
    """An operation was called on input outside its documented domain."""
