"""Exception hierarchy shared across the package."""


class DualChuaError(Exception):
    """Base class for all package errors."""


class DomainError(DualChuaError, ValueError):
    """An argument lies outside the domain of an operation (non-finite, empty, ...)."""


class ConfigurationError(DualChuaError, ValueError):
    """Component values or parameters violate a structural requirement."""


class DegenerateParameterError(DualChuaError, ValueError):
    pass


class InfeasibleRequestError(DualChuaError, ValueError):
    """A synthesis request has no solution with positive resistances."""


class UnknownPresetError(DualChuaError, KeyError):
    pass


class IntegrationOverflowError(DualChuaError, ArithmeticError):
    """A Runge-Kutta stage produced a non-finite value."""


class DivergenceError(DualChuaError, ArithmeticError):
    """A trajectory left the bounded region during an analysis that requires boundedness."""
