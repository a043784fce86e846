"""Equilibrium and flux-carrying density matrices at the barrier top."""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import wofz

from .action import sigma_theta
from .bath import Ohmic
from .dynamics import barrier_dynamics, s_asymptotic, s_of_t
from .errors import DomainError, RegimeError, TruncationWarning, UnsupportedModelError
from .matsubara import DEFAULT_N, fluct_product, omega_cap

RELATIVE = "relative"
ABSOLUTE = "drude-absolute"


def erfcx_complex(z):
    """Scaled complementary error function exp(z^2) erfc(z) for complex z."""
    return wofz(1j * np.asarray(z, dtype=complex))[()]


def erfc_complex(z):
    """Complementary error function for complex z.

    Uses the Faddeeva function w(iz) = exp(z^2) erfc(z), combined in log form
    on the right half plane so the exponential factor never overflows on its
    own, and the reflection erfc(z) = 2 - erfc(-z) on the left.
    """
    z = np.asarray(z, dtype=complex)
    flip = z.real < 0
    zz = np.where(flip, -z, z)
    w = wofz(1j * zz)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        right = np.where(w == 0, 0.0, np.exp(-zz * zz + np.log(np.where(w == 0, 1.0, w))))
    return np.where(flip, 2.0 - right, right)[()]


# the public name stresses that overflow is handled through the scaled function
erfc_scaled_complex = erfc_complex


@dataclass(frozen=True)
class FluxState:
    """Barrier-top parameters of the equilibrium and flux density matrices."""

    lam: float
    omega: float
    omega_r: float
    theta: float
    norm_mode: str = RELATIVE
    prefactor: float = 1.0

    def __post_init__(self):
        if not self.lam < 0:
            raise RegimeError(f"Lambda = {self.lam} >= 0: theta is at or beyond theta_c")
        if not 0 < self.omega_r <= 1:
            raise DomainError(f"omega_R = {self.omega_r} outside (0, 1]")
        if self.omega_r * self.theta >= math.pi:
            raise UnsupportedModelError("omega_R theta >= pi: S(t) changes sign, flux branch undefined")
        if self.norm_mode not in (RELATIVE, ABSOLUTE):
            raise DomainError(f"unknown norm_mode {self.norm_mode!r}")


def flux_state(model, theta, N=DEFAULT_N, norm_mode=RELATIVE, dynamics=None):
    """Build a FluxState; ``dynamics`` may be passed to reuse an existing table."""
    dyn = dynamics if dynamics is not None else barrier_dynamics(model, theta, N)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        omega = float(omega_cap(dyn.table))
    prefactor = 1.0
    if norm_mode == ABSOLUTE:
        if isinstance(dyn.model, Ohmic) and dyn.model.gamma > 0:
            raise UnsupportedModelError("absolute normalization needs a Drude bath (the Ohmic product diverges)")
        if dyn.lam >= 0:
            raise RegimeError(f"Lambda = {dyn.lam} >= 0 at theta = {theta}")
        prefactor = (
            float(fluct_product(dyn.table)) / math.sqrt(-dyn.lam) / (theta * math.sqrt(4.0 * math.pi))
        )
    return FluxState(
        lam=dyn.lam, omega=omega, omega_r=dyn.omega_r, theta=float(theta),
        norm_mode=norm_mode, prefactor=prefactor,
    )


def rho_theta(state, x_f, r_f):
    """Equilibrium density matrix exp((i/2) Sigma_theta) times the normalization prefactor."""
    phase = 0.5j * sigma_theta(state.lam, state.omega, x_f, r_f)
    return state.prefactor * np.exp(phase)[()]


def _standardize(state, x_f, r_f):
    root = math.sqrt(-state.lam)
    return (np.asarray(r_f) - 1j * (-state.lam) * state.omega_r * np.asarray(x_f)) / (2.0 * root)


def form_factor_stationary(state, x_f, r_f):
    """Stationary form factor g(x_f, r_f); 1/2 erfc(r/(2 sqrt|Lambda|)) on the diagonal."""
    return 0.5 * erfc_complex(_standardize(state, x_f, r_f))


def form_factor_t(state, dynamics, x_f, r_f, t, exact=False):
    """Form factor at finite t with the S^2/(S^2 - Lambda^2) and Sdot/S terms kept."""
    w = state.omega_r
    if w * t < 10.0 * (1.0 - 1e-12):
        raise DomainError(f"omega_R t = {w * t:.3g} < 10: the large-time form does not apply")
    if exact:
        s0 = s_of_t(dynamics, t)
        s1 = s_of_t(dynamics, t, 1)
    else:
        s0 = float(s_asymptotic(dynamics, t))
        s1 = float(s_asymptotic(dynamics, t, 1))
    if not s0 < 0:
        raise UnsupportedModelError("S(t) >= 0: flux branch undefined")
    lam = state.lam
    kappa_t = s0 * s0 / (s0 * s0 - lam * lam)
    shift = 1j * lam * (s1 / s0) * np.asarray(x_f)
    arg = (np.asarray(r_f) + shift) * math.sqrt(kappa_t) / (2.0 * math.sqrt(-lam))
    return 0.5 * erfc_complex(arg)


def rho_flux(state, x_f, r_f):
    """Stationary flux solution rho_theta * g."""
    return rho_theta(state, x_f, r_f) * form_factor_stationary(state, x_f, r_f)


def rho_flux_dx(state, x_f, r_f):
    """Analytic x-derivative of rho_flux."""
    rho = rho_theta(state, x_f, r_f)
    g = form_factor_stationary(state, x_f, r_f)
    arg = _standardize(state, x_f, r_f)
    root = math.sqrt(-state.lam)
    dg = 1j * root * state.omega_r / (2.0 * math.sqrt(math.pi)) * np.exp(-arg * arg)
    return (rho * (-0.5 * state.omega * np.asarray(x_f) * g + dg))[()]


def flux_profile(state, q_grid):
    """Rows (q, g(0, q)) of the diagonal form factor."""
    q = np.asarray(q_grid, dtype=float)
    if not np.all(np.isfinite(q)):
        raise DomainError("q grid must be finite")
    g = np.real(form_factor_stationary(state, 0.0, q))
    return np.column_stack([q, g])

