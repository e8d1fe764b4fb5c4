"""Exception hierarchy shared across the package."""


class SerialTError(Exception):
    """Base class for all serialt errors."""


class DomainError(SerialTError, ValueError):
    """A parameter is outside its mathematically valid range."""


class MinimumSizeError(SerialTError, ValueError):
    """A series is too short for the requested test or estimator."""


class DegenerateDataError(SerialTError, ValueError):
    """Residuals carry no variability, so nothing can be inferred."""


class ConvergenceError(SerialTError, RuntimeError):
    """An iterative routine exhausted its budget without converging."""


class ValidationError(SerialTError, ValueError):
    """User-supplied input (file, config, request) failed validation."""
