"""Exception types raised across the package."""


class FreeChaosError(Exception):
    """Base class for all errors raised by freechaos."""


class BoundedInputError(FreeChaosError, ValueError):
    """An integer argument lies outside the supported enumeration range."""


class DomainError(FreeChaosError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(FreeChaosError, ValueError):
    """Operands have incompatible orders, dimensions or lengths."""


class CapacityError(FreeChaosError, ValueError):
    """A requested object does not fit in the allotted space."""


class ClassificationError(FreeChaosError, ValueError):
    """A contraction sequence is not in the class an operation requires."""


class NormalizationError(FreeChaosError, ValueError):
    """A kernel family drifted away from its prescribed squared norm."""


class KernelFormatError(FreeChaosError, ValueError):
    """A kernel text file could not be parsed."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)
        self.lineno = lineno


class QuadratureError(FreeChaosError, RuntimeError):
    """Adaptive refinement did not reach the requested tolerance."""

    def __init__(self, message, estimate, error_bound):
        super().__init__("%s (estimate=%r, error bound=%r)"
                         % (message, estimate, error_bound))
        self.estimate = estimate
        self.error_bound = error_bound
