"""Barrier propagator G+(t) from the poles of its Laplace transform.

For rational gamma_hat the transform 1/(z^2 + z gamma_hat(z) - 1) has finitely
many simple poles, so G+ is a finite sum of exponentials.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .bath import Drude, Ohmic
from .errors import DegeneratePolesError, DomainError


@dataclass(frozen=True, eq=False)
class PoleDecomposition:
    """Poles z_i and residues r_i with G+(t) = sum_i r_i exp(z_i t)."""

    model: object
    poles: np.ndarray
    residues: np.ndarray
    gh_index: int

    @property
    def omega_r(self):
        return float(self.poles[self.gh_index].real)

    @property
    def residue_r(self):
        return float(self.residues[self.gh_index].real)


def _characteristic(model, z):
    return z * z + z * model.gamma_hat(z) - 1.0


def grote_hynes(model):
    """Positive root omega_R of omega^2 + omega*gamma_hat(omega) = 1."""
    if isinstance(model, Ohmic):
        half = 0.5 * model.gamma
        # 1/(sqrt(1+g^2/4) + g/2) avoids cancellation at large gamma
        return 1.0 / (math.sqrt(1.0 + half * half) + half)
    if model.gamma == 0:
        return 1.0
    f = lambda w: float(_characteristic(model, w))  # noqa: E731
    root = brentq(f, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    for _ in range(3):
        fp = 2 * root + model.gamma_hat(root) + root * model.gamma_hat_prime(root)
        root -= f(root) / fp
    return float(root)


def _polish(coeffs, z):
    p = np.poly1d(coeffs)
    dp = p.deriv()
    for _ in range(4):
        step = p(z) / dp(z)
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def decompose_gplus(model):
    """Pole/residue decomposition of the barrier propagator."""
    omega_r = grote_hynes(model)
    if isinstance(model, Ohmic) or model.gamma == 0:
        g = model.gamma
        poles = np.array([omega_r, -(omega_r + g)], dtype=complex)
        residues = 1.0 / (2.0 * poles + g)
    elif isinstance(model, Drude):
        wd, g = model.omega_d, model.gamma
        coeffs = [1.0, wd, g * wd - 1.0, -wd]
        raw = np.roots(coeffs)
        poles = np.array([_polish(coeffs, complex(z)) for z in raw])
        k = int(np.argmin(np.abs(poles - omega_r)))
        poles[k] = omega_r
        # P'(z_i) as the product of pole differences keeps near-coincident pairs accurate
        dp = np.array([np.prod([z - w for j, w in enumerate(poles) if j != i]) for i, z in enumerate(poles)])
        residues = (poles + wd) / dp
    else:
        raise TypeError(f"unknown damping model {model!r}")

    # snap conjugate pairs and real poles so the sum is exactly real
    poles = np.where(np.abs(poles.imag) < 1e-14 * np.maximum(1.0, np.abs(poles)), poles.real, poles)
    dist = np.abs(poles[:, None] - poles[None, :])
    np.fill_diagonal(dist, np.inf)
    if np.min(dist) <= 1e-8:
        raise DegeneratePolesError(
            f"repeated poles for {model!r}; perturb the parameters slightly"
        )
    positive = np.flatnonzero(poles.real > 0)
    if len(positive) != 1:
        raise DegeneratePolesError(f"expected exactly one unstable pole, found {len(positive)}")
    return PoleDecomposition(model, poles, residues.astype(complex), int(positive[0]))


def gplus(decomp, t, order=0):
    """d^order/dt^order of G+(t); G+ vanishes for t < 0."""
    t = np.asarray(t, dtype=float)
    if order < 0:
        raise DomainError("order must be >= 0")
    if np.any(t < 0):
        if order > 0:
            raise DomainError("derivatives of G+ are not defined for t < 0")
    tt = np.maximum(t, 0.0)
    z = decomp.poles
    w = decomp.residues * z**order
    terms = w[:, None] * np.exp(np.multiply.outer(z, tt.ravel()))
    val = terms.sum(axis=0).real.reshape(tt.shape)
    if order == 0:
        val = np.where(t < 0, 0.0, val)
    return val[()]


def a_of_t(decomp, t, order=0):
    """A(t) = -G+(t)/2 and its derivatives."""
    return -0.5 * gplus(decomp, t, order)


def a_asymptotic(decomp, t, order=0):
    """Leading exponential of A(t) from the unstable pole."""
    w = decomp.omega_r
    return -0.5 * decomp.residue_r * w**order * np.exp(w * np.asarray(t, dtype=float))[()]
