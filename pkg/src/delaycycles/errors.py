"""Exception hierarchy shared by all delaycycles modules."""


class DelayCyclesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DelayCyclesError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class NumericalError(DelayCyclesError, ArithmeticError):
    """A computation failed numerically (non-finite state, no convergence)."""


class AccuracyError(NumericalError):
    """Quadrature refinement did not settle within tolerance."""


class RootFindingError(NumericalError):
    """An iterative root finder failed to converge from every seed."""


class InsufficientDataError(NumericalError):
    """Too few oscillation peaks to estimate an amplitude."""


class BracketError(NumericalError):
    """Both ends of a bisection bracket fall on the same branch."""
