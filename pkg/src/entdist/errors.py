"""Shared exception types."""


class DomainError(ValueError):
    """Input violates a physical or mathematical precondition."""
