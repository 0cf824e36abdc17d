"""Exception hierarchy shared by all modules."""


class ConifoldError(Exception):
    """Base class for every error raised by the package."""


class DomainError(ConifoldError, ValueError):
    """Arguments lie outside the domain where the quantity is defined."""


class PoleHit(DomainError):
    """The requested point is a pole of the function."""


class NoRepresentation(ConifoldError):
    """No rotation or shift brings the arguments into a usable strip."""


class PoleTooClose(ConifoldError):
    """A pole of the integrand sits too close to the integration contour."""


class NoConvergence(ConifoldError):
    """An iterative or adaptive procedure exhausted its budget."""


class TruncationOverflow(ConifoldError):
    """A formal series operation exceeded its degree budget."""
