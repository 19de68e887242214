"""Exception hierarchy shared by the library and the CLI."""


class RmpropError(Exception):
    """Base class for all library errors."""


class ParameterError(RmpropError, ValueError):
    """Invalid physical parameters, grid sizes or configuration values."""


class DomainError(RmpropError, ValueError):
    """An argument lies outside the domain of the evaluated function."""


class ToleranceError(RmpropError, ArithmeticError):
    """A quadrature could not meet its requested tolerance."""

    def __init__(self, message, estimate=None, q=None):
        super().__init__(message)
        self.estimate = estimate
        self.q = q


class SolverError(RmpropError, RuntimeError):
    """The eigen-solver failed or produced pairs with a large residual."""
