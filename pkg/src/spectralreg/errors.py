"""Exception types shared across the package."""


class SpectralregError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SpectralregError, ValueError):
    """Raised when inputs violate a documented precondition."""


class NumericError(SpectralregError, RuntimeError):
    """Raised when a numerical routine fails (non-PD matrix, underflow, ...)."""


class SingularCovarianceError(NumericError):
    """Raised when a spectral value falls below the invertibility floor."""
