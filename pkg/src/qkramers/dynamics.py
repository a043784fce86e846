"""Real- and imaginary-time dynamics near the barrier top.

Builds on the pole decomposition of G+ (``propagator``) and the Matsubara
table: the bath correlation functions C1, C2, the function S(t) that pairs
with A(t) = -G+(t)/2, and the extremal paths entering the effective action.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import _kernels
from ._series import euler_maclaurin_tail
from .bath import Ohmic
from .errors import CausticError, DomainError, QuadratureError, UnsupportedModelError
from .matsubara import DEFAULT_N, build_table, lambda_cap
from .propagator import (  # noqa: F401 - re-exported
    PoleDecomposition,
    a_asymptotic,
    a_of_t,
    decompose_gplus,
    gplus,
    grote_hynes,
)

CAUSTIC_GUARD = 1e-6


@dataclass(frozen=True, eq=False)
class BarrierDynamics:
    """Everything needed to evaluate paths and S(t) at one inverse temperature."""

    decomposition: PoleDecomposition
    table: object
    lam: float
    c1_quadrature_tol: float = 1e-9

    @property
    def model(self):
        return self.table.model

    @property
    def theta(self):
        return self.table.theta

    @property
    def omega_r(self):
        return self.decomposition.omega_r


def barrier_dynamics(model, theta, N=DEFAULT_N, c1_quadrature_tol=1e-9, table=None):
    """Assemble BarrierDynamics for a damping model and inverse temperature."""
    if table is None:
        table = build_table(model, theta, N)
    return BarrierDynamics(
        decomposition=decompose_gplus(model),
        table=table,
        lam=float(lambda_cap(table)),
        c1_quadrature_tol=c1_quadrature_tol,
    )


def _has_memory(model):
    if isinstance(model, Ohmic):
        if model.gamma > 0:
            return None
        return False
    return model.gamma > 0


def _tail_if_visible(f, n_last, head):
    # cheap size check first: the remainder is at most ~ N |f(N)| for 1/n^2 decay
    probe = abs(f(float(n_last))) * n_last
    if probe <= 1e-17 * max(abs(head), 1e-300):
        return 0.0
    return euler_maclaurin_tail(f, n_last)


def _c1_value(dyn, s):
    model, tab = dyn.model, dyn.table
    g, a = model.gamma, model.omega_d
    head = _kernels.c1_partial(tab.nu, tab.u, g, a, s)

    def term(x):
        nu = tab.nu_at(x)
        return tab.u_at(x) * _kernels.drude_g_scalar(nu, a, g, s)

    head += _tail_if_visible(term, tab.N, head)
    return (-g * a * math.exp(-a * s) + 2.0 * head) / tab.theta


def _c2_value(dyn, s):
    model, tab = dyn.model, dyn.table
    g, a = model.gamma, model.omega_d
    head = _kernels.c2_partial(tab.nu, tab.u, g, a, s)

    def term(x):
        nu = tab.nu_at(x)
        return nu * tab.u_at(x) * _kernels.drude_f_scalar(nu, a, g, s)

    head += _tail_if_visible(term, tab.N, head)
    return 2.0 * head / tab.theta


def _check_c_args(dyn, s):
    memory = _has_memory(dyn.model)
    if memory is None:
        raise UnsupportedModelError("C1, C2 need a pointwise damping kernel (Drude)")
    if s < 0:
        raise DomainError("c_functions needs s >= 0")
    return memory


def c_functions(dyn, s):
    """(C1(s), C2(s)) for s >= 0."""
    if not _check_c_args(dyn, s):
        return 0.0, 0.0
    return _c1_value(dyn, s), _c2_value(dyn, s)


def c1(dyn, s):
    """C1(s) alone; the hot integrand of S(t) and r(s)."""
    if not _check_c_args(dyn, s):
        return 0.0
    return _c1_value(dyn, s)


def _adaptive(f, lo, hi, tol, what, epsabs=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, lo, hi, epsabs=epsabs, epsrel=tol, limit=400)
    scale = max(abs(val), 1e-300)
    if not math.isfinite(val) or err > max(10.0 * tol * scale, 10.0 * epsabs, 1e-14):
        raise QuadratureError(f"{what}: quadrature reached only {err:.2e}", achieved=err)
    return val


def _c1_convolution(dyn, t, order):
    """int_0^t C1(s) G+^(order)(t - s) ds."""
    dec = dyn.decomposition
    return _adaptive(
        lambda s: c1(dyn, s) * gplus(dec, t - s, order),
        0.0,
        t,
        dyn.c1_quadrature_tol,
        "C1 convolution",
    )


def s_of_t(dyn, t, order=0):
    """S(t) = Lambda Gdot+(t) + int_0^t C1(s) G+(t-s) ds, and derivatives up to 2."""
    if order not in (0, 1, 2):
        raise DomainError("order must be 0, 1 or 2")
    if t <= 0:
        raise DomainError("s_of_t needs t > 0")
    memory = _has_memory(dyn.model)
    if memory is None:
        raise UnsupportedModelError("exact S(t) needs C1, i.e. a Drude model")
    dec = dyn.decomposition
    value = dyn.lam * gplus(dec, t, order + 1)
    if memory:
        value += _c1_convolution(dyn, t, order)
        if order == 2:
            value += c1(dyn, t)
    return float(value)


def s_asymptotic(dyn, t, order=0):
    """Leading exponential of S(t): -(1/2) cot(omega_R theta/2) r_R exp(omega_R t)."""
    dec = dyn.decomposition
    w = dec.omega_r
    cot = 1.0 / math.tan(0.5 * w * dyn.theta)
    return -0.5 * cot * dec.residue_r * w**order * np.exp(w * np.asarray(t, dtype=float))[()]


def gplus_stable(decomp, t, order=0):
    """G+^(order)(t) with the unstable-pole exponential removed."""
    t = np.asarray(t, dtype=float)
    keep = np.arange(len(decomp.poles)) != decomp.gh_index
    z = decomp.poles[keep]
    w = decomp.residues[keep] * z**order
    val = (w[:, None] * np.exp(np.multiply.outer(z, t.ravel()))).sum(axis=0).real
    return val.reshape(t.shape)[()]


def _c1_laplace_tail(dyn, t):
    """exp(omega_R t) * int_t^inf C1(s) exp(-omega_R s) ds."""
    w = dyn.omega_r
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(lambda v: c1(dyn, t + v) * math.exp(-w * v), 0.0, np.inf,
                        epsabs=1e-15, epsrel=dyn.c1_quadrature_tol, limit=400)
    return val


def s_components(dyn, t):
    """Split S^(k)(t) = lead * omega_R^k * exp(omega_R t) + rest_k(t) for k = 0, 1, 2.

    Returns ``(lead, (rest_0, rest_1, rest_2))``. The remainders stay O(1) at
    large t, which lets combinations such as Sdot - Adot S/A be formed
    without cancelling two exponentially large numbers.
    """
    if t <= 0:
        raise DomainError("s_components needs t > 0")
    memory = _has_memory(dyn.model)
    if memory is None:
        raise UnsupportedModelError("exact S(t) needs C1, i.e. a Drude model")
    dec = dyn.decomposition
    w = dec.omega_r
    lead = -0.5 / math.tan(0.5 * w * dyn.theta) * dec.residue_r
    rest = [dyn.lam * float(gplus_stable(dec, t, k + 1)) for k in range(3)]
    if memory:
        tail = _c1_laplace_tail(dyn, t)
        for k in range(3):
            conv = _adaptive(
                lambda s, k=k: c1(dyn, s) * gplus_stable(dec, t - s, k),
                0.0,
                t,
                dyn.c1_quadrature_tol,
                "C1 convolution",
                epsabs=1e-13,
            )
            rest[k] += conv - dec.residue_r * w**k * tail
        rest[2] += c1(dyn, t)
    return lead, tuple(rest)


def _g_total(decomp, t_total):
    g_t = float(gplus(decomp, t_total))
    if abs(g_t) < 1e-300 or t_total <= 0:
        raise CausticError(f"G+(t) vanishes at t = {t_total}")
    return g_t


def x_path(decomp, t_total, x_i, x_f, s):
    """Backward-propagated difference coordinate x(s) with x(0)=x_i, x(t)=x_f."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > t_total):
        raise DomainError("s must lie in [0, t_total]")
    g_t = _g_total(decomp, t_total)
    gd_t = float(gplus(decomp, t_total, 1))
    back = t_total - s
    g_b = gplus(decomp, back)
    gd_b = gplus(decomp, back, 1)
    return (x_i * g_b / g_t + x_f * (gd_b - g_b * gd_t / g_t))[()]


def r_path(dyn, t_total, r_i, r_f, rbar, s):
    """Forward sum coordinate r(s) with r(0)=r_i, r(t)=r_f under the source rbar C1/Lambda."""
    s = float(s)
    if not 0.0 <= s <= t_total:
        raise DomainError("s must lie in [0, t_total]")
    dec = dyn.decomposition
    g_t = _g_total(dec, t_total)
    g_s = float(gplus(dec, s))
    homogeneous = r_f * g_s / g_t + r_i * (
        float(gplus(dec, s, 1)) - g_s * float(gplus(dec, t_total, 1)) / g_t
    )
    if rbar == 0:
        return homogeneous
    memory = _has_memory(dyn.model)
    if memory is None:
        raise UnsupportedModelError("r_path with rbar != 0 needs C1, i.e. a Drude model")
    if not memory:
        return homogeneous
    k = rbar / dyn.lam
    inner = _c1_convolution(dyn, s, 0) if s > 0 else 0.0
    outer = _c1_convolution(dyn, t_total, 0)
    return homogeneous + k * (inner - g_s / g_t * outer)


def simpson_weights(s_grid):
    """Composite Simpson weights on a uniform grid with an odd number of points."""
    s_grid = np.asarray(s_grid, dtype=float)
    m = s_grid.size
    if m < 3 or m % 2 == 0:
        raise DomainError("path grid needs an odd number (>= 3) of points")
    h = (s_grid[-1] - s_grid[0]) / (m - 1)
    if not np.allclose(np.diff(s_grid), h, rtol=1e-9, atol=1e-12 * max(1.0, abs(h))):
        raise DomainError("path grid must be uniform")
    w = np.full(m, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * h / 3.0


def path_functionals(dyn, s_grid, x_values):
    """(f_n[x], g_n[x]) for n = 0..N by Simpson quadrature of the sampled path."""
    model = dyn.model
    tab = dyn.table
    x_values = np.asarray(x_values, dtype=float)
    memory = _has_memory(model)
    if memory is None:
        if np.any(x_values != 0):
            raise UnsupportedModelError("path functionals need pointwise g_n(s) (Drude)")
        memory = False
    if not memory:
        zeros = np.zeros(tab.N + 1)
        return zeros, zeros.copy()
    wx = simpson_weights(s_grid) * x_values
    return _kernels.path_functionals(tab.nu, model.gamma, model.omega_d, np.asarray(s_grid, float), wx)


def imaginary_path(dyn, xbar, rbar, sigma, path=None):
    """Minimal-action imaginary-time path qbar(sigma) for 0 < sigma < theta.

    ``path`` is an optional ``(s_grid, x_values)`` sample of the real-time
    difference path; omitted means x(s) = 0. Complex in general.
    """
    tab = dyn.table
    theta = tab.theta
    lam = dyn.lam
    if abs(lam) < CAUSTIC_GUARD:
        raise CausticError(f"|Lambda| = {abs(lam):.2e} is too close to the caustic")
    sig = np.atleast_1d(np.asarray(sigma, dtype=float))
    if np.any(sig <= 0) or np.any(sig >= theta):
        raise DomainError("sigma must lie in (0, theta)")

    if path is None:
        fx = np.zeros(tab.N + 1)
        gx = np.zeros(tab.N + 1)
    else:
        fx, gx = path_functionals(dyn, *path)

    u, nu, zeta = tab.u, tab.nu, tab.zeta
    ug_sum = -gx[0] + 2.0 * _kernels.compensated_sum(u[1:] * gx[1:])
    b = -(rbar - 1j * ug_sum / theta) / lam

    c = 2.0 * math.pi / theta
    inv_nu2 = np.zeros_like(nu)
    inv_nu2[1:] = 1.0 / nu[1:] ** 2
    sin_coef = np.zeros_like(nu)
    sin_coef[1:] = u[1:] * (zeta[1:] - 1.0) / nu[1:]
    ug = u * gx
    uf = u * fx

    out = np.empty(sig.shape, dtype=complex)
    for k, s in enumerate(sig):
        x = c * s
        # remainder of sum u_n cos(nu_n s) from the 1/nu^2 asymptote (Clausen closed form)
        clausen = math.pi**2 / 6.0 - 0.5 * math.pi * x + 0.25 * x * x
        ucos = _kernels.cos_sum(u, nu, s) + clausen / c**2 - _kernels.cos_sum(inv_nu2, nu, s)
        val = -xbar * (0.5 - s / theta)
        val += 2.0 * xbar / theta * _kernels.sin_sum(sin_coef, nu, s)
        val += b / theta * (1.0 - 2.0 * ucos)
        if path is not None:
            val += 1j / theta * (-gx[0] + 2.0 * _kernels.cos_sum(ug, nu, s))
            val -= 2.0 / theta * _kernels.sin_sum(uf, nu, s)
        out[k] = val
    return out[0] if np.ndim(sigma) == 0 else out
