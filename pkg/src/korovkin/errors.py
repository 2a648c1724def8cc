"""Exception hierarchy shared by every module in the package."""


class KorovkinError(Exception):
    """Base class for all package errors."""


class NonFiniteEvaluation(KorovkinError, ArithmeticError):
    """A function returned NaN or an infinity where a finite value was required."""

    def __init__(self, message, points=None):
        super().__init__(message)
        self.points = points


class DepthExceeded(KorovkinError):
    """Adaptive quadrature hit ``max_depth`` before meeting its tolerance.

    The best available estimate is carried on the exception so callers
    can decide whether it is good enough.
    """

    def __init__(self, estimate, error, message=None):
        super().__init__(
            message
            or f"quadrature depth exceeded (estimate={estimate!r}, error={error:.3g})"
        )
        self.estimate = estimate
        self.error = error


class InvalidSpace(KorovkinError, ValueError):
    """A space description violates the constraints of its kind."""


class InvalidOperator(KorovkinError, ValueError):
    """An operator description is malformed or fails its positivity probe."""


class InvalidFunction(KorovkinError, ValueError):
    """A function handle fails one of its sampled invariants."""


class MissingDerivative(KorovkinError, ValueError):
    """A derivative-based bound was requested for a function without one."""


class NotPeriodic(KorovkinError, ValueError):
    """A trigonometric bound was requested for a non-periodic function."""


class NonUnitalWithoutOne(KorovkinError):
    """A custom operator's image of the constant 1 could not be evaluated."""
