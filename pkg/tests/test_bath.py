import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from qkramers.bath import (
    Drude,
    Ohmic,
    fourier_coeffs,
    gamma_hat,
    gamma_kernel,
    k_kernel,
    k_kernel_ohmic_closed,
    spectral_density,
    zeta_n,
)
from qkramers.errors import DomainError, UnsupportedModelError


def test_gamma_hat_values():
    assert gamma_hat(Ohmic(3.0), 0.5) == 3.0
    assert gamma_hat(Drude(1.0, 10.0), 0.0) == 1.0
    assert gamma_hat(Drude(1.0, 10.0), 10.0) == 0.5


def test_gamma_hat_drude_pole():
    with pytest.raises(DomainError):
        gamma_hat(Drude(1.0, 10.0), -10.0)


def test_gamma_hat_complex_argument():
    z = 1.0 + 2.0j
    assert gamma_hat(Drude(2.0, 5.0), z) == pytest.approx(10.0 / (6.0 + 2.0j))


@pytest.mark.parametrize("z", [0.1, 1.0, 10.0])
def test_drude_tends_to_ohmic(z):
    assert abs(gamma_hat(Drude(2.0, 1e4), z) / 2.0 - 1.0) < 1e-3


def test_invalid_models():
    with pytest.raises(DomainError):
        Ohmic(-1.0)
    with pytest.raises(DomainError):
        Drude(1.0, 0.0)
    with pytest.raises(DomainError):
        Drude(math.nan, 1.0)


def test_gamma_kernel():
    model = Drude(1.0, 10.0)
    assert gamma_kernel(model, 0.0) == 10.0
    assert gamma_kernel(model, 0.1) == pytest.approx(3.67879, abs=1e-5)
    with pytest.raises(UnsupportedModelError):
        gamma_kernel(Ohmic(1.0), 0.0)


def test_spectral_density():
    assert spectral_density(Ohmic(2.0), 3.0) == 6.0
    assert spectral_density(Drude(2.0, 10.0), 0.0) == 0.0
    assert spectral_density(Drude(1.0, 10.0), 10.0) == pytest.approx(5.0)


def test_spectral_density_is_cosine_preimage_of_kernel():
    model = Drude(1.0, 10.0)
    for s in np.linspace(0.01, 2.0, 9):
        # I(w)/w written out to avoid 0/0 at the origin
        integrand = lambda w: model.gamma * model.omega_d**2 / (w * w + model.omega_d**2)  # noqa: E731
        val, _ = quad(integrand, 0.0, np.inf, weight="cos", wvar=s, limlst=200)
        assert 2.0 / math.pi * val == pytest.approx(gamma_kernel(model, s), rel=1e-6, abs=1e-9)


def test_zeta_n():
    assert zeta_n(Ohmic(3.0), 2.0) == 6.0
    assert zeta_n(Drude(1.0, 10.0), 0.0) == 0.0
    assert zeta_n(Drude(1.0, 10.0), 10.0) == pytest.approx(5.0)


def _g_by_quadrature(model, nu, s):
    # cosine-transform definition over the bath frequencies
    a = abs(nu)

    def integrand(w):
        return spectral_density(model, w) * w / (w * w + a * a)

    val, _ = quad(integrand, 0.0, np.inf, weight="cos", wvar=s, limlst=200)
    return 2.0 / math.pi * val


def _f_by_quadrature(model, nu, s):
    def integrand(w):
        return spectral_density(model, w) / (w * w + nu * nu)

    val, _ = quad(integrand, 0.0, np.inf, weight="sin", wvar=s, limlst=200)
    return 2.0 / math.pi * nu * val


def test_fourier_coeffs_quadrature_oracle():
    model, theta, s = Drude(1.0, 10.0), 1.0, 0.3
    nu = 2.0 * math.pi / theta
    g, f = fourier_coeffs(model, 1, theta, s)
    assert g == pytest.approx(_g_by_quadrature(model, nu, s), abs=1e-8)
    assert f == pytest.approx(_f_by_quadrature(model, nu, s), abs=1e-8)


@pytest.mark.parametrize("n,s", [(0, 0.2), (2, 0.05), (5, 1.3), (1, 0.0)])
def test_fourier_coeffs_quadrature_grid(n, s):
    model, theta = Drude(2.0, 4.0), 1.5
    nu = 2.0 * math.pi * n / theta
    g, f = fourier_coeffs(model, n, theta, s)
    if s > 0:
        assert g == pytest.approx(_g_by_quadrature(model, nu, s), abs=1e-8)
    assert f == pytest.approx(_f_by_quadrature(model, nu, s) if s > 0 else 0.0, abs=1e-8)


def test_fourier_coeffs_zero_mode_and_ohmic():
    _, f0 = fourier_coeffs(Drude(1.0, 10.0), 0, 1.0, 0.7)
    assert f0 == 0.0
    with pytest.raises(UnsupportedModelError):
        fourier_coeffs(Ohmic(1.0), 1, 1.0, 0.2)
    g, f = fourier_coeffs(Ohmic(0.0), 1, 1.0, 0.2)
    assert g == 0.0 and f == 0.0


def test_fourier_coeffs_resonant_cutoff():
    # |nu_n| equal to omega_d hits the removable singularity of the closed form
    theta = 2.0 * math.pi / 10.0
    g, f = fourier_coeffs(Drude(1.0, 10.0), 1, theta, 0.4)
    g_near, f_near = fourier_coeffs(Drude(1.0, 10.0 * (1 + 1e-9)), 1, theta, 0.4)
    assert g == pytest.approx(g_near, rel=1e-7)
    assert f == pytest.approx(f_near, rel=1e-7)


@settings(max_examples=60, deadline=None)
@given(
    gamma=st.floats(0.01, 5.0),
    omega_d=st.floats(0.1, 100.0),
    n=st.integers(1, 200),
    theta=st.floats(0.1, 6.0),
    s=st.floats(0.0, 5.0),
)
def test_fourier_parity(gamma, omega_d, n, theta, s):
    model = Drude(gamma, omega_d)
    g_p, f_p = fourier_coeffs(model, n, theta, s)
    g_m, f_m = fourier_coeffs(model, -n, theta, s)
    assert g_m == g_p
    assert f_m == -f_p


def test_k_kernel_undamped_is_zero():
    assert k_kernel(Ohmic(0.0), 1.0, 0.3) == 0.0


def test_k_kernel_self_convergence():
    a = k_kernel(Drude(1.0, 10.0), 2.0, 1.0, N=2000)
    b = k_kernel(Drude(1.0, 10.0), 2.0, 1.0, N=4000)
    assert a == pytest.approx(b, rel=1e-6)
    assert a.n_terms == 2000


def test_k_kernel_ohmic_matches_closed_form():
    for sigma in (0.2, 0.5, 0.8):
        for N in (500, 5000):
            assert k_kernel(Ohmic(2.0), 1.0, sigma, N=N) == pytest.approx(
                k_kernel_ohmic_closed(2.0, 1.0, sigma), rel=1e-12
            )


def test_k_kernel_integrates_to_zero():
    # the midpoint rule integrates every cosine mode of the bare partial sum exactly
    model, theta, N = Drude(1.0, 10.0), 2.0, 400
    m = 4 * N
    sig = (np.arange(m) + 0.5) * theta / m
    vals = np.array([k_kernel(model, theta, s, N).partial for s in sig])
    scale = np.max(np.abs(vals))
    assert abs(vals.sum() * theta / m) < 1e-10 * scale


def test_k_kernel_domain():
    with pytest.raises(DomainError):
        k_kernel(Drude(1.0, 10.0), 1.0, 0.0)
    with pytest.raises(DomainError):
        k_kernel(Drude(1.0, 10.0), 1.0, 1.0)
