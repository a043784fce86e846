"""Effective actions of the barrier propagating function.

All actions are complex quadratic forms in the end coordinates. The full
real-time action keeps every term; the asymptotic one drops what decays
relative to exp(omega_R t).
"""

import math
import warnings
from dataclasses import dataclass, fields

from .dynamics import gplus_stable, s_components
from .errors import CausticError, RegimeError, TruncationWarning
from .matsubara import omega_cap
from .propagator import a_asymptotic, a_of_t


@dataclass(frozen=True)
class ActionContext:
    """Lambda, Omega, omega_R and A, S with two time derivatives at time t.

    ``a_curv``, ``s_drift`` and ``s_curv`` hold Addot - Adot^2/A,
    Sdot - Adot S/A and Sddot - Adot Sdot/A. They vanish exponentially at
    large t; the constructors below evaluate them without cancellation. If
    left as None they are formed directly from the other fields.
    """

    lam: float
    omega: float
    omega_r: float
    A: float
    A_dot: float
    A_ddot: float
    S: float
    S_dot: float
    S_ddot: float
    t: float
    a_curv: float = None
    s_drift: float = None
    s_curv: float = None

    def __post_init__(self):
        if not self.lam < 0:
            raise RegimeError(f"Lambda = {self.lam} must be negative (theta < theta_c)")
        if self.A == 0:
            raise CausticError("A(t) vanishes")
        derived = {
            "a_curv": self.A_ddot - self.A_dot**2 / self.A,
            "s_drift": self.S_dot - self.A_dot * self.S / self.A,
            "s_curv": self.S_ddot - self.A_dot * self.S_dot / self.A,
        }
        for name, value in derived.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _omega_for(dyn, omega):
    if omega is not None:
        return float(omega)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return float(omega_cap(dyn.table))


def asymptotic_context(dyn, t, omega=None):
    """Context built from the leading exponentials of A and S."""
    dec = dyn.decomposition
    w = dec.omega_r
    a = [float(a_asymptotic(dec, t, k)) for k in range(3)]
    cot = 1.0 / math.tan(0.5 * w * dyn.theta)
    s = [a[k] * cot for k in range(3)]
    return ActionContext(
        lam=dyn.lam, omega=_omega_for(dyn, omega), omega_r=w,
        A=a[0], A_dot=a[1], A_ddot=a[2], S=s[0], S_dot=s[1], S_ddot=s[2], t=float(t),
        a_curv=0.0, s_drift=0.0, s_curv=0.0,
    )


def _wronskian(lead_f, rest_f, lead_h, rest_h, w, e, i, j):
    """F^(i) H^(j) - H^(i) F^(j) with the exp(2 w t) part cancelled analytically.

    Each function is lead * w^k * e + rest[k] with e = exp(w t).
    """
    cross = (
        lead_f * w**i * rest_h[j] + lead_h * w**j * rest_f[i]
        - lead_h * w**i * rest_f[j] - lead_f * w**j * rest_h[i]
    )
    return e * cross + rest_f[i] * rest_h[j] - rest_h[i] * rest_f[j]


def exact_context(dyn, t, omega=None):
    """Context with exact A(t), S(t); needs C1 (Drude) unless undamped."""
    dec = dyn.decomposition
    w = dec.omega_r
    e = math.exp(w * t)
    a_lead = -0.5 * dec.residue_r
    a_rest = [-0.5 * float(gplus_stable(dec, t, k)) for k in range(3)]
    s_lead, s_rest = s_components(dyn, t)
    a = [float(a_of_t(dec, t, k)) for k in range(3)]
    s = [s_lead * w**k * e + s_rest[k] for k in range(3)]
    a0 = a[0]
    # numerators A'' A - A'^2, S' A - A' S and S'' A - A' S'
    a_curv = (
        e * a_lead * (w**2 * a_rest[0] + a_rest[2] - 2.0 * w * a_rest[1])
        + a_rest[2] * a_rest[0] - a_rest[1] ** 2
    )
    s_drift = _wronskian(s_lead, s_rest, a_lead, a_rest, w, e, 1, 0)
    s_curv = (
        e * (s_lead * w**2 * a_rest[0] + a_lead * s_rest[2] - a_lead * w * s_rest[1] - s_lead * w * a_rest[1])
        + s_rest[2] * a_rest[0] - a_rest[1] * s_rest[1]
    )
    return ActionContext(
        lam=dyn.lam, omega=_omega_for(dyn, omega), omega_r=w,
        A=a0, A_dot=a[1], A_ddot=a[2], S=s[0], S_dot=s[1], S_ddot=s[2], t=float(t),
        a_curv=a_curv / a0, s_drift=s_drift / a0, s_curv=s_curv / a0,
    )


def action_context(dyn, t, exact=False, omega=None):
    return exact_context(dyn, t, omega) if exact else asymptotic_context(dyn, t, omega)


def sigma_theta(lam, omega, xbar, rbar):
    """Imaginary-time action i rbar^2/(2 Lambda) + i Omega xbar^2/2."""
    if lam == 0:
        raise CausticError("Lambda = 0: imaginary-time action is singular")
    return 1j * rbar * rbar / (2.0 * lam) + 0.5j * omega * xbar * xbar


def sigma_t_full(ctx, x_f, r_f, x_i, r_i, xbar, rbar):
    """Real-time effective action for general imaginary-time endpoints."""
    lam, om = ctx.lam, ctx.omega
    A, Ad, S, Sd = ctx.A, ctx.A_dot, ctx.S, ctx.S_dot
    rate = Ad / A

    endpoint = (x_f * r_f + x_i * r_i) * rate + x_i * r_f / (2.0 * A) - 2.0 * x_f * r_i * ctx.a_curv
    rbar_xi = rbar * x_i * (-rate - S / (2.0 * lam * A))
    rbar_xf = rbar * x_f * (2.0 * ctx.a_curv + ctx.s_drift / lam)
    xbar_xi = 1j * xbar * x_i * (-om + Sd / (2.0 * A))
    xbar_xf = -1j * xbar * x_f * ctx.s_curv
    xi_xi = 0.5j * x_i**2 * (om - Sd / A + (lam * lam - S * S) / (4.0 * lam * A * A))
    # curly bracket rewritten as -(S A/Lambda^2) s_drift - Adot to avoid cancellation
    xi_xf = 1j * x_i * x_f * (ctx.s_curv + S / (2.0 * lam * A) * ctx.s_drift + lam * Ad / (2.0 * A * A))
    xf_xf = 0.5j * x_f**2 * (om + lam * rate**2 - ctx.s_drift**2 / lam)
    return endpoint + rbar_xi + rbar_xf + xbar_xi + xbar_xf + xi_xi + xi_xf + xf_xf


def sigma_t_tilde(ctx, x_f, r_f, x_i, r_i):
    """Large-time action with xbar = x_i, rbar = r_i (pass an asymptotic context)."""
    lam, om = ctx.lam, ctx.omega
    A, Ad, S = ctx.A, ctx.A_dot, ctx.S
    rate = Ad / A
    value = (x_f * r_f + x_i * r_i) * rate + x_i * r_f / (2.0 * A)
    value -= r_i * x_i * (rate + S / (2.0 * lam * A))
    value += 0.5j * x_i**2 * (-om + (lam * lam - S * S) / (4.0 * lam * A * A))
    value += 1j * x_i * x_f * lam * Ad / (2.0 * A * A)
    value += 0.5j * x_f**2 * (om + lam * rate**2)
    return value


def sigma_tilde(ctx, x_f, r_f, x_i, r_i):
    """Total large-time action: equilibrium part at (x_i, r_i) plus the real-time part."""
    return sigma_theta(ctx.lam, ctx.omega, x_i, r_i) + sigma_t_tilde(ctx, x_f, r_f, x_i, r_i)


def extremal_point(ctx, x_f, r_f):
    """Stationary point (x_i0, r_i0) of the total large-time action."""
    x_i0 = -2.0 * ctx.A_dot * x_f + 2j * ctx.A * r_f / ctx.lam
    r_i0 = 1j * ctx.S_dot * x_f + ctx.S * r_f / ctx.lam
    return x_i0, r_i0


def sigma_hat(ctx, x_hat, r_hat):
    """Action of the shifted coordinates about the stationary point."""
    lam, A, S = ctx.lam, ctx.A, ctx.S
    return 1j / (2.0 * lam) * (
        r_hat**2 + 1j * (S / A) * r_hat * x_hat - (S * S - lam * lam) / (4.0 * A * A) * x_hat**2
    )
