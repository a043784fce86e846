import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import erfc

from qkramers.bath import Drude, Ohmic
from qkramers.dynamics import barrier_dynamics
from qkramers.errors import DomainError, RegimeError, UnsupportedModelError
from qkramers.fluxstate import (
    ABSOLUTE,
    FluxState,
    erfc_complex,
    erfc_scaled_complex,
    flux_profile,
    flux_state,
    form_factor_stationary,
    form_factor_t,
    rho_flux,
    rho_flux_dx,
    rho_theta,
)


@pytest.fixture(scope="module")
def dyn33():
    return barrier_dynamics(Ohmic(3.0), 3.0)


@pytest.fixture(scope="module")
def state33(dyn33):
    return flux_state(Ohmic(3.0), 3.0, dynamics=dyn33)


def erfc_by_quadrature(z):
    # erfc(z) = erfc(Re z) - (2/sqrt(pi)) int_0^{Im z} exp(-(x + i y)^2) i dy along the vertical leg
    x, y = z.real, z.imag
    re = quad(lambda s: (np.exp(-(x + 1j * s) ** 2) * 1j).real, 0, y, epsabs=0, epsrel=1e-13)[0]
    im = quad(lambda s: (np.exp(-(x + 1j * s) ** 2) * 1j).imag, 0, y, epsabs=0, epsrel=1e-13)[0]
    return erfc(x) - 2 / math.sqrt(math.pi) * (re + 1j * im)


def test_erfc_simple_values():
    assert erfc_complex(0) == 1
    assert abs(erfc_complex(40.0)) < 1e-300
    assert erfc_complex(-40.0) == pytest.approx(2.0)
    assert erfc_scaled_complex is erfc_complex


@pytest.mark.parametrize("z", [1 + 1j, 0.3 - 2j, -1.5 + 0.7j, 2.5 + 3j])
def test_erfc_matches_quadrature(z):
    ref = erfc_by_quadrature(z)
    assert abs(erfc_complex(z) - ref) < 1e-10 * max(1.0, abs(ref))


@pytest.mark.parametrize("x", np.linspace(-5, 25, 31))
def test_erfc_real_axis(x):
    assert erfc_complex(x).real == pytest.approx(erfc(x), rel=1e-12, abs=1e-300)
    assert erfc_complex(x).imag == 0


def test_erfc_large_argument_does_not_overflow():
    z = 30 + 29j
    val = erfc_complex(z)
    assert np.isfinite(val)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(-6, 6), y=st.floats(-6, 6))
def test_erfc_reflection_and_conjugation(x, y):
    z = complex(x, y)
    a, b = erfc_complex(z), erfc_complex(-z)
    scale = max(1.0, abs(a), abs(b))
    assert abs(a + b - 2) < 1e-12 * scale
    assert abs(erfc_complex(z.conjugate()) - a.conjugate()) < 1e-12 * scale


def test_state_guards():
    with pytest.raises(RegimeError):
        FluxState(lam=0.1, omega=1.0, omega_r=1.0, theta=1.0)
    with pytest.raises(DomainError):
        FluxState(lam=-0.1, omega=1.0, omega_r=1.5, theta=1.0)
    with pytest.raises(UnsupportedModelError):
        FluxState(lam=-0.1, omega=1.0, omega_r=1.0, theta=3.2)
    with pytest.raises(DomainError):
        FluxState(lam=-0.1, omega=1.0, omega_r=1.0, theta=1.0, norm_mode="other")


def test_absolute_mode_needs_drude():
    with pytest.raises(UnsupportedModelError):
        flux_state(Ohmic(3.0), 1.0, norm_mode=ABSOLUTE)
    drude = flux_state(Drude(1.0, 10.0), 1.0, norm_mode=ABSOLUTE)
    assert drude.prefactor > 0
    assert rho_theta(drude, 0, 0) == pytest.approx(drude.prefactor)


def test_rho_theta_values():
    st0 = flux_state(Ohmic(0.0), 1.0)
    assert rho_theta(st0, 0, 0) == 1
    assert rho_theta(st0, 0.0, 1.0) == pytest.approx(1.31410, abs=1e-5)
    assert rho_theta(st0, 0.0, 1.0) == pytest.approx(math.exp(1 / (4 * 0.5 / math.tan(0.5))), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-3, 3), r=st.floats(-3, 3))
def test_rho_theta_hermitian(state33, x, r):
    a = rho_theta(state33, x, r)
    assert abs(rho_theta(state33, -x, r) - np.conj(a)) < 1e-12 * max(1.0, abs(a))


def test_stationary_values(state33):
    assert form_factor_stationary(state33, 0, 0) == pytest.approx(0.5, abs=1e-15)
    r = 2 * math.sqrt(-state33.lam)
    assert form_factor_stationary(state33, 0, r).real == pytest.approx(0.078650, abs=1e-6)
    assert form_factor_stationary(state33, 0, r).real == pytest.approx(0.5 * erfc(1.0), rel=1e-12)


def test_diagonal_closed_form(state33):
    r = np.linspace(-10, 10, 2001)
    g = form_factor_stationary(state33, 0.0, r)
    ref = 0.5 * erfc(r / (2 * math.sqrt(-state33.lam)))
    assert np.max(np.abs(g - ref)) < 1e-12
    step = np.diff(g.real)
    assert np.all(step <= 0)
    interior = (g.real[1:] > 1e-14) & (g.real[1:] < 1 - 1e-14)
    assert np.all(step[interior] < 0)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(-20, 20))
def test_diagonal_reflection(state33, r):
    total = form_factor_stationary(state33, 0.0, r) + form_factor_stationary(state33, 0.0, -r)
    assert abs(total - 1) < 1e-12


def test_rho_flux_limits(state33):
    assert rho_flux(state33, 0, 0) == pytest.approx(rho_theta(state33, 0, 0) / 2)
    far = -12 * math.sqrt(-state33.lam)
    assert rho_flux(state33, 0, far) == pytest.approx(rho_theta(state33, 0, far), rel=1e-12)
    r = np.linspace(0, 6 * math.sqrt(-state33.lam), 400)
    vals = np.real(rho_flux(state33, 0.0, r))
    assert np.all(np.diff(vals) < 0)
    # Gaussian growth of rho_theta cancels against g, leaving sqrt|Lambda| / (sqrt(pi) r)
    root = math.sqrt(-state33.lam)
    for k in (20.0, 40.0):
        asym = root / (math.sqrt(math.pi) * k * root)
        assert rho_flux(state33, 0.0, k * root).real == pytest.approx(asym, rel=4 / k**2)


def test_rho_flux_real_on_diagonal(state33):
    r = np.linspace(-8, 8, 161)
    vals = rho_flux(state33, 0.0, r)
    assert np.max(np.abs(vals.imag)) < 1e-12
    assert np.all(vals.real >= 0)


def test_rho_flux_dx_matches_finite_difference(state33):
    h = 1e-5
    for x, r in ((0.0, 0.0), (0.3, -0.4), (-0.2, 1.1)):
        fd = (rho_flux(state33, x + h, r) - rho_flux(state33, x - h, r)) / (2 * h)
        assert abs(rho_flux_dx(state33, x, r) - fd) < 1e-8


def test_form_factor_t_approaches_stationary(dyn33, state33):
    coords = (0.3, 0.4)
    gaps = []
    for wt in (10.0, 15.0, 20.0, 30.0):
        t = wt / state33.omega_r
        gaps.append(abs(form_factor_t(state33, dyn33, *coords, t) - form_factor_stationary(state33, *coords)))
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[2] < 1e-8
    late = 60.0 / state33.omega_r
    assert abs(form_factor_t(state33, dyn33, *coords, late) - form_factor_stationary(state33, *coords)) < 1e-10


def test_form_factor_t_limits(dyn33, state33):
    t = 40.0 / state33.omega_r
    assert form_factor_t(state33, dyn33, 0.0, -1e3, t) == pytest.approx(1.0)
    assert form_factor_t(state33, dyn33, 0.0, 0.0, t) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        form_factor_t(state33, dyn33, 0.0, 0.0, 5.0 / state33.omega_r)


def test_form_factor_t_exact_dynamics():
    model = Drude(1.0, 10.0)
    dyn = barrier_dynamics(model, 1.0)
    state = flux_state(model, 1.0, dynamics=dyn)
    t = 25.0 / state.omega_r
    a = form_factor_t(state, dyn, 0.2, 0.3, t)
    b = form_factor_t(state, dyn, 0.2, 0.3, t, exact=True)
    assert abs(a - b) < 1e-9


def test_profile_shape():
    widths = []
    for theta in (0.1, 0.5, 3.0):
        state = flux_state(Ohmic(3.0), theta)
        q = np.linspace(-30, 30, 6001)
        rows = flux_profile(state, q)
        assert rows.shape == (q.size, 2)
        g = rows[:, 1]
        assert np.all((g >= 0) & (g <= 1))
        assert rows[3000, 1] == pytest.approx(0.5, abs=1e-12)
        widths.append(np.interp(-0.1, -g, q) - np.interp(-0.9, -g, q))
    assert widths[0] > widths[1] > widths[2]
    with pytest.raises(DomainError):
        flux_profile(flux_state(Ohmic(3.0), 1.0), [0.0, np.nan])
