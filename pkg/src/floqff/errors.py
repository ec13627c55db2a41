"""Exception hierarchy shared by all floqff modules."""


class FloqffError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FloqffError):
    """Input outside an operation's declared supported range."""


class ContractViolationError(FloqffError):
    """Caller handed in data violating a documented precondition."""


class NumericalError(FloqffError):
    """A numerical routine failed to reach its accuracy target."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AccuracyError(FloqffError):
    """Time stepping too coarse for the requested tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class GridError(FloqffError):
    """A required time-grid point is missing from a recorded result."""


class SingularityError(FloqffError):
    """Protocol parameters sit inside a guard band around a singular point."""


class DegeneracyError(FloqffError):
    """Spectrum too close to degenerate for a gauge-potential construction."""


class FitError(FloqffError):
    """Nonlinear least squares did not converge."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ConfigError(FloqffError):
    """Configuration file is malformed or inconsistent."""


class UsageError(FloqffError):
    """Command line invoked with invalid arguments."""
