"""Decay rate over the barrier, the flux at the top, and the validity checks."""

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from ._series import SeriesValue, euler_maclaurin_tail
from .bath import Drude, Ohmic
from .errors import DomainError, PoleError, RegimeError, TruncationWarning, UnsupportedModelError
from .fluxstate import rho_flux_dx
from .matsubara import (
    DEFAULT_N,
    fluct_product,
    omega_cap,
    ratio_product,
    theta_critical,
    well_product,
)
from .propagator import grote_hynes

THETA_MARGIN = 0.04
MATCHING_THRESHOLD = 0.1
PLATEAU_C = 3.0
IMPOSSIBLE_DENOMINATOR = 1e-12
RESONANCE_GUARD = 1e-9


@dataclass(frozen=True)
class Validity:
    matching_ratio: float
    matching_ok: bool
    matching_possible: bool
    plateau: tuple
    plateau_ok: bool
    theta_ok: bool
    theta_c: float
    theta_over_theta_c: float
    matching_threshold: float = MATCHING_THRESHOLD
    plateau_c: float = PLATEAU_C


@dataclass(frozen=True)
class RateReport:
    """Gamma = arrhenius * prefactor_classical * quantum_factor, in units of omega_0."""

    gamma_rate: float
    arrhenius: float
    prefactor_classical: float
    quantum_factor: float
    omega_r: float
    theta: float
    validity: Validity

    def as_dict(self):
        out = asdict(self)
        out["validity"]["plateau"] = list(self.validity.plateau)
        return out


def _strict_ohmic(model):
    return isinstance(model, Ohmic) and model.gamma > 0


def _check_theta(table, params):
    if abs(table.theta - params.theta) > 1e-12 * max(1.0, params.theta):
        raise DomainError(f"table theta {table.theta} differs from params theta {params.theta}")


def _omega(table):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return float(omega_cap(table))


def partition_well(table, params):
    """Damped harmonic-well partition function, energies measured from the barrier top."""
    _check_theta(table, params)
    theta, w = params.theta, params.omega_w
    return float(well_product(table, w)) * math.exp(theta * params.v_b) / (theta * w)


def matching_condition(state, table, params, threshold=MATCHING_THRESHOLD):
    """Ratio |Lambda| eps^2 / (1 - omega_R^2 |Lambda|/Omega) and whether it is below threshold.

    A denominator at or below zero means the flux state cannot be matched to
    equilibrium at any anharmonicity; the ratio is then inf.
    """
    if not state.lam < 0:
        raise RegimeError(f"Lambda = {state.lam} >= 0", theta=state.theta)
    mag = -state.lam
    den = 1.0 - state.omega_r**2 * mag / state.omega
    if den <= IMPOSSIBLE_DENOMINATOR:
        return math.inf, False
    ratio = mag * params.epsilon**2 / den
    return ratio, bool(ratio < threshold)


def plateau_window(state, params, c=PLATEAU_C):
    """Times (t_min, t_max) bounding the quasi-stationary flux; empty if t_max <= t_min."""
    w = state.omega_r
    t_min = c / w
    t_max = math.log(1.0 / (params.epsilon * math.sqrt(-state.lam))) / w
    return t_min, t_max


def _validity(state, table, params, theta_c, theta_margin, threshold, plateau_c):
    ratio, ok = matching_condition(state, table, params, threshold)
    t_min, t_max = plateau_window(state, params, plateau_c)
    return Validity(
        matching_ratio=ratio,
        matching_ok=ok,
        matching_possible=math.isfinite(ratio),
        plateau=(t_min, t_max),
        plateau_ok=bool(t_max > t_min),
        theta_ok=bool(params.theta <= (1.0 - theta_margin) * theta_c),
        theta_c=float(theta_c),
        theta_over_theta_c=params.theta / theta_c,
        matching_threshold=threshold,
        plateau_c=plateau_c,
    )


def _state_from_table(table):
    from .fluxstate import FluxState
    from .matsubara import lambda_cap

    return FluxState(
        lam=float(lambda_cap(table)), omega=_omega(table),
        omega_r=grote_hynes(table.model), theta=table.theta,
    )


def decay_rate(
    table,
    params,
    theta_c=None,
    theta_margin=THETA_MARGIN,
    matching_threshold=MATCHING_THRESHOLD,
    plateau_c=PLATEAU_C,
):
    """Escape rate with quantum corrections to the prefactor, plus its validity report.

    Refuses with RegimeError when theta exceeds (1 - theta_margin) theta_c.
    """
    _check_theta(table, params)
    if theta_c is None:
        theta_c = theta_critical(table.model, table.N)
    limit = (1.0 - theta_margin) * theta_c
    if params.theta > limit:
        raise RegimeError(
            f"theta = {params.theta} exceeds {(1 - theta_margin):.2f} theta_c = {limit:.6g} "
            f"(theta_c = {theta_c:.6g})",
            theta=params.theta, theta_c=theta_c,
        )
    omega_r = grote_hynes(table.model)
    arrhenius = math.exp(-params.theta * params.v_b)
    classical = params.omega_w * omega_r / (2.0 * math.pi)
    quantum = float(ratio_product(table, params.omega_w))
    state = _state_from_table(table)
    validity = _validity(state, table, params, theta_c, theta_margin, matching_threshold, plateau_c)
    return RateReport(
        gamma_rate=arrhenius * classical * quantum,
        arrhenius=arrhenius,
        prefactor_classical=classical,
        quantum_factor=quantum,
        omega_r=omega_r,
        theta=params.theta,
        validity=validity,
    )


def probability_flux(state):
    """Flux -2i d/dx rho_fl at the barrier top, in the state's normalization."""
    return float(np.real(-2j * rho_flux_dx(state, 0.0, 0.0)))


def flux_at_top(state, table, params, check=False, rel_tol=1e-8):
    """Rate as top flux over well population.

    The flux comes from the derivative of the stationary flux solution.
    For Drude and undamped baths it is put on the absolute scale with the
    fluctuation product and divided by the well partition function. For
    strict Ohmic friction both products diverge; their convergent ratio is
    used instead. With ``check=True`` the result is compared with
    ``decay_rate`` and a mismatch beyond ``rel_tol`` raises ArithmeticError.
    """
    _check_theta(table, params)
    flux_rel = probability_flux(state) / state.prefactor
    norm = 1.0 / (math.sqrt(-state.lam) * params.theta * math.sqrt(4.0 * math.pi))
    if _strict_ohmic(table.model):
        ratio = float(ratio_product(table, params.omega_w))
        rate = flux_rel * norm * ratio * params.theta * params.omega_w * math.exp(-params.theta * params.v_b)
    else:
        flux = flux_rel * norm * float(fluct_product(table))
        rate = flux / partition_well(table, params)
    if check:
        ref = decay_rate(table, params, theta_c=math.inf).gamma_rate
        gap = abs(rate - ref) / ref
        if gap > rel_tol:
            raise ArithmeticError(f"flux route {rate!r} and product route {ref!r} differ by {gap:.2e}")
    return rate


def _require_drude(model):
    if not isinstance(model, Drude):
        raise UnsupportedModelError(f"needs a Drude bath, got {model!r}")


def _drude_sum(theta, N, term):
    """(2/theta) sum_{n>=1} term(nu_n) with a tail, guarding nu_n = 1."""
    n = np.arange(1, N + 1)
    nu = 2.0 * math.pi * n / theta
    near = np.flatnonzero(np.abs(nu * nu - 1.0) < RESONANCE_GUARD)
    if near.size:
        k = int(n[near[0]])
        raise PoleError(f"nu_{k} = 1 (theta = 2 pi {k}): resonant denominator", n=k)
    head = math.fsum(term(nu).tolist())
    rest = euler_maclaurin_tail(lambda x: float(term(2.0 * math.pi * x / theta)), N)
    scale = 2.0 / theta
    return SeriesValue(scale * (head + rest), N, scale * rest)


def kappa(model, theta, N=DEFAULT_N):
    """(2/theta) sum_{n>=1} nu omega_d / ((nu^2 - 1)(omega_d + nu))."""
    _require_drude(model)
    wd = model.omega_d
    return _drude_sum(theta, N, lambda nu: nu * wd / ((nu * nu - 1.0) * (wd + nu)))


def lambda_omega_prime(model, theta, N=DEFAULT_N):
    """First-order coefficients dLambda/dgamma and dOmega/dgamma at gamma = 0."""
    _require_drude(model)
    wd = model.omega_d
    lam_p = _drude_sum(theta, N, lambda nu: -nu * wd / ((nu * nu - 1.0) ** 2 * (wd + nu)))
    om_p = _drude_sum(theta, N, lambda nu: nu**3 * wd / ((nu * nu - 1.0) ** 2 * (wd + nu)))
    return lam_p, om_p


def drude_min_gamma(model, theta, params, N=DEFAULT_N):
    """Smallest damping for which the flux state matches equilibrium, to first order in gamma."""
    _require_drude(model)
    if not 0 < theta < math.pi:
        raise UnsupportedModelError(f"theta = {theta} outside (0, pi): tan(theta/2) is not positive")
    tan_half = math.tan(0.5 * theta)
    cutoff = (model.omega_d + 1.0) / model.omega_d
    k = float(kappa(model, theta, N))
    return cutoff / (2.0 * params.v_b * tan_half) / (1.0 + 2.0 * k * tan_half * cutoff)
