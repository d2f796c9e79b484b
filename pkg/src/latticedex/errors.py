"""Error taxonomy shared across the package."""


class LatticedexError(Exception):
    """Base class for all package errors."""


class InvalidArgument(LatticedexError, ValueError):
    """Caller passed a value outside the documented domain."""


class Unsupported(LatticedexError):
    """Request is well-formed but outside what the toolkit implements."""


class Infeasible(LatticedexError):
    """No design satisfies the request (e.g. not enough primes above p)."""


class InvariantViolation(LatticedexError):
    """An internal consistency check failed; indicates a bug or bad input data."""
