"""Quantum flux state and escape rate over a damped parabolic barrier above the crossover temperature."""

__version__ = "0.1.0"

from .bath import Drude, Ohmic, fourier_coeffs, gamma_hat, k_kernel, spectral_density
from .errors import (
    CausticError,
    DegeneratePolesError,
    DivergenceError,
    DomainError,
    KramersError,
    PoleError,
    QuadratureError,
    RegimeError,
    TruncationWarning,
    UnsupportedModelError,
)
from .matsubara import (
    MatsubaraTable,
    SystemParams,
    build_table,
    lambda_cap,
    omega_cap,
    theta_critical,
)
from .propagator import decompose_gplus, grote_hynes
from .dynamics import barrier_dynamics, c_functions, imaginary_path, s_of_t
from .action import action_context, sigma_t_full, sigma_t_tilde, sigma_tilde
from .fluxstate import (
    FluxState,
    erfc_complex,
    erfc_scaled_complex,
    flux_profile,
    flux_state,
    form_factor_stationary,
    form_factor_t,
    rho_flux,
    rho_theta,
)
from .rate import (
    RateReport,
    decay_rate,
    drude_min_gamma,
    flux_at_top,
    kappa,
    lambda_omega_prime,
    matching_condition,
    partition_well,
    plateau_window,
)
