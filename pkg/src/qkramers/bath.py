"""Damping models and the bath kernels derived from them.

Two models are supported: frequency-independent (Ohmic) friction and its
Drude-regularized version with an exponential memory kernel. Everything is in
scaled units where the barrier frequency is one.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.integrate import quad

from . import _kernels
from ._series import SeriesValue
from .errors import DomainError, UnsupportedModelError


@dataclass(frozen=True)
class Ohmic:
    """Memoryless friction, gamma_hat(z) = gamma."""

    gamma: float

    kind = "ohmic"

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise DomainError(f"gamma must be finite and >= 0, got {self.gamma}")

    def gamma_hat(self, z):
        z = np.asarray(z)
        return np.full(z.shape, self.gamma, dtype=np.result_type(z, float))[()]

    def gamma_hat_prime(self, z):
        return np.zeros_like(np.asarray(z, dtype=np.result_type(z, float)))[()]

    def describe(self):
        return {"kind": self.kind, "gamma": self.gamma}


@dataclass(frozen=True)
class Drude:
    """Exponential memory friction with cutoff omega_d."""

    gamma: float
    omega_d: float

    kind = "drude"

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise DomainError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not (math.isfinite(self.omega_d) and self.omega_d > 0):
            raise DomainError(f"omega_d must be finite and > 0, got {self.omega_d}")

    def gamma_hat(self, z):
        z = np.asarray(z)
        den = self.omega_d + z
        if np.any(den == 0):
            raise DomainError(f"gamma_hat has a pole at z = -omega_d = {-self.omega_d}")
        return (self.gamma * self.omega_d / den)[()]

    def gamma_hat_prime(self, z):
        z = np.asarray(z)
        den = self.omega_d + z
        if np.any(den == 0):
            raise DomainError(f"gamma_hat has a pole at z = -omega_d = {-self.omega_d}")
        return (-self.gamma * self.omega_d / den**2)[()]

    def describe(self):
        return {"kind": self.kind, "gamma": self.gamma, "omega_d": self.omega_d}


DampingModel = Union[Ohmic, Drude]


def is_undamped(model):
    return model.gamma == 0.0


def gamma_hat(model, z):
    """Laplace transform of the damping kernel at complex frequency z."""
    return model.gamma_hat(z)


def gamma_kernel(model, s):
    """Damping kernel gamma(s) for s >= 0 (Drude only)."""
    if isinstance(model, Ohmic):
        raise UnsupportedModelError("Ohmic damping kernel is the distribution 2*gamma*delta(s)")
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("gamma_kernel needs s >= 0")
    return (model.gamma * model.omega_d * np.exp(-model.omega_d * s))[()]


def spectral_density(model, omega):
    """Bath spectral density I(omega); its cosine transform is the damping kernel."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("spectral_density needs omega >= 0")
    if isinstance(model, Ohmic):
        return (model.gamma * omega)[()]
    wd2 = model.omega_d**2
    return (model.gamma * omega * wd2 / (omega**2 + wd2))[()]


def zeta_n(model, nu):
    """|nu| * gamma_hat(|nu|); zero at nu = 0."""
    nu = np.abs(np.asarray(nu, dtype=float))
    return (nu * model.gamma_hat(nu))[()]


def matsubara_frequency(n, theta):
    return 2.0 * math.pi * np.asarray(n, dtype=float) / theta


def _require_pointwise(model, what):
    if isinstance(model, Ohmic) and model.gamma > 0:
        raise UnsupportedModelError(f"{what} is distributional for Ohmic damping; use Drude")


def fourier_coeffs(model, n, theta, s):
    """Cosine and sine Fourier coefficients (g_n(s), f_n(s)) of the bath kernel.

    Closed forms for the Drude model; identically zero without damping.
    """
    _require_pointwise(model, "g_n(s)")
    if theta <= 0:
        raise DomainError("theta must be positive")
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("fourier_coeffs needs s >= 0")
    nu = matsubara_frequency(n, theta)
    if model.gamma == 0:
        zero = np.zeros(np.broadcast(nu, s).shape)[()]
        return zero, zero
    g = _kernels.drude_g_np(np.abs(nu), model.omega_d, model.gamma, s)
    f = _kernels.drude_f_np(nu, model.omega_d, model.gamma, s)
    return g[()], f[()]


def _abel_cos_tail(model, theta, sigma, n_last):
    """Abel-regularized remainder of sum_{n > N} zeta_n cos(nu_n sigma)."""
    x = 2.0 * math.pi * sigma / theta
    c = 2.0 * math.pi / theta
    half = math.sin(0.5 * x)
    if isinstance(model, Ohmic):
        raise TypeError("the Ohmic series is summed in closed form")
    # zeta_n = gamma*wd - gamma*wd^2/(wd + c n)
    wd = model.omega_d
    cos_tail = -math.sin((n_last + 0.5) * x) / (2.0 * half)
    beta = wd / c
    q_phase = complex(math.cos(x), math.sin(x))

    def laplace(t):
        q = math.exp(-t) * q_phase
        return math.exp(-beta * t) * ((q ** (n_last + 1)) / (1.0 - q)).real

    upper = 60.0 / (n_last + 1.0 + beta)
    frac_tail, _ = quad(laplace, 0.0, upper, epsabs=1e-15, epsrel=1e-12, limit=200)
    frac_tail /= c
    return model.gamma * wd * cos_tail - model.gamma * wd * wd * frac_tail


def k_kernel(model, theta, sigma, N=10_000):
    """Imaginary-time memory kernel k(sigma) on the open interval (0, theta).

    Returns a SeriesValue; ``partial`` is the bare sum over n <= N and the
    tail is the Abel-regularized remainder.
    """
    if not 0.0 < sigma < theta:
        raise DomainError(f"sigma must lie in (0, theta), got {sigma}")
    if N < 1:
        raise DomainError("N must be >= 1")
    if model.gamma == 0:
        return SeriesValue(0.0, N, 0.0)
    nu = matsubara_frequency(np.arange(N + 1), theta)
    zeta = zeta_n(model, nu)
    partial = _kernels.cos_sum(zeta, nu, sigma)
    if isinstance(model, Ohmic):
        # Abel sum of sum_n n cos(n x) is -1/(4 sin^2(x/2)); taking the tail as
        # the difference keeps the O(N^2) partial sum from leaking rounding error
        half = math.sin(math.pi * sigma / theta)
        tail = -model.gamma * 2.0 * math.pi / theta * 0.25 / half**2 - partial
    else:
        tail = _abel_cos_tail(model, theta, sigma, N)
    scale = 2.0 / theta
    return SeriesValue(scale * (partial + tail), N, scale * tail)


def k_kernel_ohmic_closed(gamma, theta, sigma):
    """Closed form of the Ohmic kernel away from the endpoints."""
    return -gamma * math.pi / (theta**2 * math.sin(math.pi * sigma / theta) ** 2)
