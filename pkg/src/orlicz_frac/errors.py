"""Exception hierarchy shared by all modules."""


class OrliczFracError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(OrliczFracError, ValueError):
    """An object failed one of its sampled invariants."""

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class BracketError(OrliczFracError):
    """A monotone root could not be bracketed."""


class NonFinite(OrliczFracError, FloatingPointError):
    """A quadrature node produced inf or nan."""


class DiagonalDivergence(OrliczFracError):
    """The near-diagonal part of a double integral grows under grading."""


class TailDivergence(OrliczFracError):
    """An integral over an unbounded region diverges under the tail model."""


class NotConverged(OrliczFracError):
    """Refinement changed a quadrature value by more than the tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class SingularityAtCriticalPoint(OrliczFracError):
    """The principal value is not admissible at a critical point."""


class InsufficientDecades(OrliczFracError, ValueError):
    """A decay fit was requested over too narrow a range of radii."""


class TouchViolation(OrliczFracError):
    """A test function does not touch from below."""

    def __init__(self, message, x=None, excess=None):
        super().__init__(message)
        self.x = x
        self.excess = excess


class MaxIterations(OrliczFracError):
    """An iterative solver ran out of sweeps."""

    def __init__(self, message, residual=None, solution=None):
        super().__init__(message)
        self.residual = residual
        self.solution = solution


class NonMonotoneSource(OrliczFracError, ValueError):
    """The source term is not flagged nonincreasing in its r argument."""


class SchemaError(OrliczFracError, ValueError):
    """A scenario or config block is malformed."""


class WindowClipped(UserWarning):
    """An infimal-convolution window left the data grid; tail values were used."""
