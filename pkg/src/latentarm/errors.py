"""Shared exception types."""


class ContractViolation(ValueError):
    """An operation was called with arguments that break its contract
    (dimension mismatch, out-of-range value, inconsistent shapes)."""


class NotFound(KeyError):
    """A named resource (environment, file artifact) does not exist."""


class NonFiniteError(ArithmeticError):
    """A numeric computation produced NaN or Inf; training must halt
    rather than continue with corrupted values."""
