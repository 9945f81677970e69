"""
Exception Hierarchy
===================
Every error raised on purpose by the package derives from ``SieeError`` so the
CLI can report it uniformly. Concrete classes also inherit the builtin that
best describes them, so plain ``except ValueError`` still works for callers.
"""


class SieeError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(SieeError, ValueError):
    """Vectors or matrices do not agree with the number of BS/user pairs."""


class InvalidParameterError(SieeError, ValueError):
    """A configuration or problem instance violates its invariants."""


class ZeroRateError(SieeError, ValueError):
    """A user has zero rate, so its inverse energy efficiency is unbounded."""


class SurrogateDomainError(SieeError, ValueError):
    """The quadratic-transform surrogate is evaluated outside its domain."""


class InvalidTransformOperandError(SieeError, ValueError):
    """Nonpositive numerator or denominator handed to the fraction transform."""


class InvalidOperatingPointError(SieeError, ValueError):
    """Operating point with a nonpositive power where a positive one is needed."""


class NewtonDivergedError(SieeError, RuntimeError):
    """Newton's method did not reach its tolerance within the iteration budget."""


class SingularJacobianError(SieeError, RuntimeError):
    """Neither the Newton step nor the gradient fallback could make progress."""


class InstanceTooLargeError(SieeError, ValueError):
    """Exhaustive search requested on an instance that is too large for it."""
