"""Shared exception types."""


class SpecError(ValueError):
    """A problem description failed parsing or validation."""


class SizeGuardError(ValueError):
    """An instance exceeds a built-in enumeration or register size limit."""
