"""Exception types shared across the package."""


class SkodaError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(SkodaError, ValueError):
    """Operands have incompatible dimensions."""


class DomainError(SkodaError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PreconditionError(SkodaError, ValueError):
    """A hypothesis required by an operation does not hold."""


class SingularityError(SkodaError, ArithmeticError):
    """All generators vanish at the evaluation point, so |g|^2 = 0."""

    def __init__(self, point, message=None):
        self.point = point
        super().__init__(message or f"common zero of the generators at z={point!r}")


class InfeasibleError(SkodaError):
    """f is not in the degree-truncated ideal generated by g.

    ``residual`` is the least-squares coefficient residual of the best
    attempt, kept for diagnostics.
    """

    def __init__(self, message, residual=float("nan")):
        self.residual = residual
        super().__init__(message)


class HypothesisFailed(SkodaError):
    """A finiteness hypothesis (a weighted integral) was found to diverge."""

    def __init__(self, message, values=()):
        self.values = tuple(values)
        super().__init__(message)


class ConfigError(SkodaError, ValueError):
    """Malformed run configuration; the message names the offending field."""
