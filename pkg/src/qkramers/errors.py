"""Exception and warning types shared across the package."""


class KramersError(Exception):
    """Base class for all errors raised by qkramers."""


class DomainError(KramersError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class UnsupportedModelError(KramersError, ValueError):
    """The requested quantity does not exist for this damping model."""


class DivergenceError(UnsupportedModelError):
    """A series or product diverges for the given model."""


class PoleError(KramersError, ArithmeticError):
    """A Matsubara denominator vanishes or comes too close to zero."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class CausticError(KramersError, ArithmeticError):
    """A propagator or variance vanishes where the solution divides by it."""


class DegeneratePolesError(KramersError, ArithmeticError):
    """Two poles of the barrier propagator coincide."""


class QuadratureError(KramersError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class RegimeError(KramersError, ValueError):
    """Inverse temperature too close to or beyond the critical value."""

    def __init__(self, message, theta=None, theta_c=None):
        super().__init__(message)
        self.theta = theta
        self.theta_c = theta_c


class TruncationWarning(RuntimeWarning):
    """A series was truncated without a convergent tail estimate."""
