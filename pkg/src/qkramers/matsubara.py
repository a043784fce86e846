"""Matsubara tables and the thermodynamic sums built on them.

Every series is summed explicitly up to the table's N and completed with an
Euler-Maclaurin tail evaluated on the continuous extension of its summand.
Products are accumulated as sums of log1p terms.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from ._series import SeriesValue, euler_maclaurin_tail
from .bath import Ohmic, matsubara_frequency, zeta_n
from .errors import DivergenceError, DomainError, PoleError, TruncationWarning
from .propagator import grote_hynes

DEFAULT_N = 10_000
POLE_GUARD = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Scaled inverse temperature, anharmonicity, barrier height and well frequency."""

    theta: float
    epsilon: float = 0.1
    v_b: float = 10.0
    omega_w: float = 1.0
    c4: float = 1.0

    def __post_init__(self):
        checks = {
            "theta": self.theta > 0,
            "epsilon": 0 < self.epsilon < 1,
            "v_b": self.v_b >= 0,
            "omega_w": self.omega_w > 0,
            "c4": self.c4 > 0,
        }
        for name, ok in checks.items():
            value = getattr(self, name)
            if not (ok and math.isfinite(value)):
                raise DomainError(f"invalid {name} = {value}")


@dataclass(frozen=True, eq=False)
class MatsubaraTable:
    """nu_n, zeta_n, u_n for n = 0..N at one inverse temperature."""

    theta: float
    model: object
    N: int
    nu: np.ndarray = field(repr=False)
    zeta: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    tail_order: str = "euler-maclaurin"

    def nu_at(self, x):
        return 2.0 * math.pi * x / self.theta

    def zeta_at(self, x):
        nu = self.nu_at(x)
        return nu * float(self.model.gamma_hat(nu))

    def u_at(self, x):
        """u on the continuous extension of the index."""
        nu = self.nu_at(x)
        return 1.0 / (nu * nu + nu * float(self.model.gamma_hat(nu)) - 1.0)


def build_table(model, theta, N=DEFAULT_N):
    """Tabulate the Matsubara frequencies and u_n = 1/(nu^2 + zeta - 1)."""
    if not (theta > 0 and math.isfinite(theta)):
        raise DomainError(f"theta must be positive, got {theta}")
    if N < 100:
        raise DomainError(f"N must be >= 100, got {N}")
    n = np.arange(N + 1)
    nu = matsubara_frequency(n, theta)
    zeta = zeta_n(model, nu)
    den = nu * nu + zeta - 1.0
    bad = np.flatnonzero(np.abs(den) < POLE_GUARD)
    if bad.size:
        k = int(bad[0])
        raise PoleError(f"Matsubara denominator for n={k} is {den[k]:.3e} (pole)", n=k)
    if den[1] < 0:
        raise PoleError(
            f"theta={theta} lies beyond the u_1 pole at theta = 2*pi/omega_R", n=1
        )
    u = 1.0 / den
    for arr in (nu, zeta, u):
        arr.setflags(write=False)
    return MatsubaraTable(theta=float(theta), model=model, N=int(N), nu=nu, zeta=zeta, u=u)


def _strict_ohmic(model):
    return isinstance(model, Ohmic) and model.gamma > 0


def lambda_cap(table, tail=True):
    """Lambda = -1/theta + (2/theta) sum_{n>=1} u_n."""
    head = _kernels.compensated_sum(table.u[1:])
    rest = euler_maclaurin_tail(table.u_at, table.N) if tail else 0.0
    scale = 2.0 / table.theta
    value = -1.0 / table.theta + scale * (head + rest)
    return SeriesValue(value, table.N, scale * rest)


def omega_cap(table, tail=True):
    """Omega = (1/theta)[1 + 2 sum_{n>=1} (zeta_n - 1) u_n].

    Diverges logarithmically for strict Ohmic damping; the cutoff value is
    then returned with converged=False and a TruncationWarning.
    """
    terms = (table.zeta[1:] - 1.0) * table.u[1:]
    head = _kernels.compensated_sum(terms)
    scale = 2.0 / table.theta
    if _strict_ohmic(table.model):
        warnings.warn(
            "Omega diverges logarithmically for strict Ohmic damping; "
            f"returning the value cut off at N={table.N}",
            TruncationWarning,
            stacklevel=2,
        )
        value = (1.0 + 2.0 * head) / table.theta
        return SeriesValue(value, table.N, 0.0, converged=False)
    rest = 0.0
    if tail:
        rest = euler_maclaurin_tail(lambda x: (table.zeta_at(x) - 1.0) * table.u_at(x), table.N)
    value = (1.0 + 2.0 * (head + rest)) / table.theta
    return SeriesValue(value, table.N, scale * rest)


def theta_critical(model, N=DEFAULT_N, xtol=1e-10):
    """Smallest theta where Lambda changes sign from negative to positive."""
    theta_pole = 2.0 * math.pi / grote_hynes(model)
    # just below the u_1 pole, u_1 -> +inf, so Lambda is large and positive
    theta_top = theta_pole * (1.0 - 1e-7)

    def lam(theta):
        return float(lambda_cap(build_table(model, theta, N)))

    lo = 0.01
    if lam(lo) >= 0:
        raise DomainError("Lambda is not negative at theta = 0.01")
    hi = lo
    while True:
        nxt = min(hi * 1.5, theta_top)
        if lam(nxt) > 0:
            lo, hi = hi, nxt
            break
        if nxt >= theta_top:
            raise DomainError("no sign change of Lambda below the u_1 pole")
        hi = nxt
    return brentq(lam, lo, hi, xtol=xtol, rtol=1e-14, maxiter=200)


def _log_series(table, terms, tail_fn, tail):
    head = _kernels.sum_log1p(terms)
    rest = euler_maclaurin_tail(tail_fn, table.N) if tail else 0.0
    total = head + rest
    return SeriesValue(math.exp(total), table.N, math.exp(total) - math.exp(head))


def log_ratio_product(table, omega_w, tail=True):
    """log of prod_{n>=1} (nu^2 + zeta + omega_w^2)/(nu^2 + zeta - 1)."""
    c = omega_w * omega_w + 1.0
    terms = c * table.u[1:]
    if np.any(terms <= -1.0):
        raise PoleError("nonpositive factor in the rate product")
    head = _kernels.sum_log1p(terms)
    rest = euler_maclaurin_tail(lambda x: math.log1p(c * table.u_at(x)), table.N) if tail else 0.0
    return head + rest, rest


def ratio_product(table, omega_w, tail=True):
    """prod_{n>=1} (nu^2 + zeta + omega_w^2)/(nu^2 + zeta - 1); converges for all models."""
    if omega_w <= 0:
        raise DomainError("omega_w must be positive")
    total, rest = log_ratio_product(table, omega_w, tail)
    return SeriesValue(math.exp(total), table.N, math.exp(total) - math.exp(total - rest))


def fluct_product(table, tail=True):
    """prod_{n>=1} nu_n^2 u_n (fluctuation factor of the barrier density matrix)."""
    if _strict_ohmic(table.model):
        raise DivergenceError("prod nu_n^2 u_n diverges for strict Ohmic damping (sum gamma/nu_n)")
    nu = table.nu[1:]
    terms = (table.zeta[1:] - 1.0) / nu**2
    head = -_kernels.sum_log1p(terms)
    rest = 0.0
    if tail:
        rest = -euler_maclaurin_tail(
            lambda x: math.log1p((table.zeta_at(x) - 1.0) / table.nu_at(x) ** 2), table.N
        )
    total = head + rest
    return SeriesValue(math.exp(total), table.N, math.exp(total) - math.exp(head))


def well_product(table, omega_w, tail=True):
    """prod_{n>=1} nu_n^2/(nu_n^2 + zeta_n + omega_w^2) for the damped well."""
    if _strict_ohmic(table.model):
        raise DivergenceError("well product diverges for strict Ohmic damping (sum gamma/nu_n)")
    w2 = omega_w * omega_w
    nu = table.nu[1:]
    terms = (table.zeta[1:] + w2) / nu**2
    head = -_kernels.sum_log1p(terms)
    rest = 0.0
    if tail:
        rest = -euler_maclaurin_tail(
            lambda x: math.log1p((table.zeta_at(x) + w2) / table.nu_at(x) ** 2), table.N
        )
    total = head + rest
    return SeriesValue(math.exp(total), table.N, math.exp(total) - math.exp(head))
