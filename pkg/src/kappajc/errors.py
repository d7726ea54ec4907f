"""Exception and warning types raised by kappajc."""


class KappaJCError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(KappaJCError, ValueError):
    """A truncation or matrix dimension is unusable."""


class DomainError(KappaJCError, ValueError):
    """A quantum number lies outside the allowed range."""


class TruncationError(KappaJCError, ValueError):
    """The Fock cutoff is too small for the requested state."""

    def __init__(self, message, required_n_max=None):
        super().__init__(message)
        self.required_n_max = required_n_max


class NumericFailure(KappaJCError, ArithmeticError):
    """A linear-algebra routine produced non-finite or inaccurate output."""


class ValidationError(KappaJCError, ValueError):
    """An input or intermediate object violates a required property."""


class RewriteError(KappaJCError, KeyError):
    """A symbol has no entry in a transformation table."""


class EdgeClippingWarning(UserWarning):
    """Components falling outside the truncated basis were dropped."""
