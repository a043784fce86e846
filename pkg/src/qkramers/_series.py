"""Series results that carry their truncation metadata, and tail estimates."""

import math
import warnings

from scipy.integrate import IntegrationWarning, quad

from .errors import TruncationWarning


class SeriesValue(float):
    """A float that remembers how it was summed.

    Behaves as a plain float in arithmetic. ``n_terms`` is the last index
    summed explicitly, ``tail`` the estimate added for the remainder, and
    ``partial`` the value without it.
    """

    def __new__(cls, value, n_terms, tail=0.0, converged=True, partial=None):
        obj = super().__new__(cls, value)
        obj.n_terms = int(n_terms)
        obj.tail = float(tail)
        obj.converged = bool(converged)
        obj.partial = float(value - tail) if partial is None else float(partial)
        return obj

    def __repr__(self):
        return (
            f"SeriesValue({float(self)!r}, n_terms={self.n_terms}, "
            f"tail={self.tail:.3e}, converged={self.converged})"
        )

    def __reduce__(self):
        return (
            SeriesValue,
            (float(self), self.n_terms, self.tail, self.converged, self.partial),
        )


def euler_maclaurin_tail(f, n_last, rel_tol=1e-12):
    """Estimate sum_{n > n_last} f(n) for smooth f decaying at least like 1/n^2.

    Uses the midpoint form int_{N+1/2}^inf f - f'(N+1/2)/24; the integral is
    mapped onto (0, 1] by x = (N+1/2)/tau.
    """
    x0 = n_last + 0.5

    def integrand(tau):
        x = x0 / tau
        return f(x) * x / tau

    degraded = False
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            integral, err = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=rel_tol, limit=200)
        except IntegrationWarning:
            warnings.simplefilter("ignore", IntegrationWarning)
            integral, err = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=rel_tol, limit=400)
            degraded = abs(err) > 1e-3 * abs(integral)
    if degraded:
        warnings.warn(
            f"tail integral beyond n={n_last} reached only {err:.2e}",
            TruncationWarning,
            stacklevel=3,
        )
    h = 1e-3 * x0
    slope = (f(x0 + h) - f(x0 - h)) / (2.0 * h)
    tail = integral - slope / 24.0
    if not math.isfinite(tail):
        warnings.warn(f"non-finite tail estimate beyond n={n_last}", TruncationWarning, stacklevel=3)
        return 0.0
    return tail
