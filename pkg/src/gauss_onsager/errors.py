"""Exception hierarchy shared by all modules."""


class GaussOnsagerError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(GaussOnsagerError, ValueError):
    """Matrix shapes are incompatible or not of the required 2L x 2L form."""


class DomainError(GaussOnsagerError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ValidationError(GaussOnsagerError, ValueError):
    """An input violates a structural requirement (e.g. Hermiticity)."""


class NumericalError(GaussOnsagerError, ArithmeticError):
    """A numerical routine failed or produced an unusable result."""


class SingularMatrixError(NumericalError):
    """A matrix that must be inverted is singular or too ill-conditioned."""


class InstabilityError(GaussOnsagerError):
    """The drift matrix has a non-negative spectral abscissa."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnsupportedError(GaussOnsagerError, ValueError):
    """The requested operation is not defined for this kind of input."""


class IntegrationError(NumericalError):
    """A trajectory left the set of bona-fide covariance matrices."""

    def __init__(self, message, time=None, margin=None):
        super().__init__(message)
        self.time = time
        self.margin = margin


class ConsistencyError(NumericalError):
    """An identity that must hold for valid inputs was violated."""
