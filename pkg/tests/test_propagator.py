import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkramers.bath import Drude, Ohmic
from qkramers.errors import DomainError
from qkramers.propagator import a_asymptotic, a_of_t, decompose_gplus, gplus, grote_hynes


def test_grote_hynes_values():
    assert grote_hynes(Ohmic(0.0)) == 1.0
    assert grote_hynes(Ohmic(3.0)) == pytest.approx((-3 + math.sqrt(13)) / 2, abs=1e-15)


@pytest.mark.parametrize("model", [Ohmic(0.5), Drude(0.1, 10.0), Drude(3.0, 0.5), Drude(50.0, 1e3)])
def test_grote_hynes_residual(model):
    w = grote_hynes(model)
    assert 0 < w <= 1
    assert abs(w * w + w * float(model.gamma_hat(w)) - 1.0) < 1e-12


def test_grote_hynes_first_order_drude():
    w = grote_hynes(Drude(0.1, 10.0))
    assert w == pytest.approx(1 - 0.05 * 10 / 11, abs=0.1**2)


def test_decompose_undamped():
    dec = decompose_gplus(Ohmic(0.0))
    order = np.argsort(dec.poles.real)
    assert np.allclose(dec.poles[order], [-1.0, 1.0])
    assert np.allclose(dec.residues[order], [-0.5, 0.5])


def test_decompose_ohmic():
    dec = decompose_gplus(Ohmic(3.0))
    assert sorted(dec.poles.real) == pytest.approx([-3.302776, 0.302776], abs=1e-6)
    assert abs(dec.residues.sum()) < 1e-15
    assert abs((dec.residues * dec.poles).sum() - 1) < 1e-15


def test_decompose_drude_cubic():
    dec = decompose_gplus(Drude(1.0, 10.0))
    assert len(dec.poles) == 3
    assert np.allclose(np.polyval([1, 10, 9, -10], dec.poles), 0, atol=1e-12)
    assert abs(dec.residues.sum()) < 1e-12
    assert abs((dec.residues * dec.poles).sum() - 1) < 1e-12


@settings(max_examples=50, deadline=None)
@given(gamma=st.one_of(st.just(0.0), st.floats(1e-3, 20.0)), omega_d=st.floats(0.05, 1e4))
def test_residue_sum_rules(gamma, omega_d):
    # gamma -> 0 with omega_d -> 1 merges two poles; draws stay away from that point
    dec = decompose_gplus(Drude(gamma, omega_d))
    assert abs(dec.residues.sum()) < 1e-12
    assert abs((dec.residues * dec.poles).sum() - 1) < 1e-12
    assert dec.poles[dec.gh_index].imag == 0
    assert 0 < dec.omega_r <= 1
    assert int(np.sum(dec.poles.real > 0)) == 1


def test_gplus_initial_values_and_closed_form():
    for model in (Ohmic(0.0), Ohmic(2.0), Drude(1.0, 10.0)):
        dec = decompose_gplus(model)
        assert gplus(dec, 0.0) == pytest.approx(0.0, abs=1e-15)
        assert gplus(dec, 0.0, 1) == pytest.approx(1.0, abs=1e-14)
    assert gplus(decompose_gplus(Ohmic(0.0)), 1.0) == pytest.approx(math.sinh(1.0), abs=1e-15)


def test_gplus_negative_time():
    dec = decompose_gplus(Ohmic(1.0))
    assert gplus(dec, -1.0) == 0.0
    with pytest.raises(DomainError):
        gplus(dec, -1.0, 1)


@pytest.mark.parametrize("model", [Ohmic(1.0), Drude(2.0, 3.0)])
def test_gplus_second_derivative_finite_difference(model):
    dec = decompose_gplus(model)
    h = 1e-4
    for t in (0.5, 1.0, 2.0):
        fd = (gplus(dec, t + h) - 2 * gplus(dec, t) + gplus(dec, t - h)) / h**2
        assert fd == pytest.approx(gplus(dec, t, 2), rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("model", [Ohmic(1.0), Drude(2.0, 3.0)])
def test_gplus_equation_of_motion(model):
    # Gddot + int gamma(t-s) Gdot(s) ds - G = 0 is encoded in the poles; check it via
    # the Laplace residue form z^2 + z gamma_hat(z) - 1 = 0 at every pole
    dec = decompose_gplus(model)
    for z in dec.poles:
        assert abs(z * z + z * model.gamma_hat(z) - 1) < 1e-10


def test_a_of_t():
    dec = decompose_gplus(Ohmic(0.0))
    assert a_of_t(dec, 0.0) == 0.0
    assert a_of_t(dec, 1.0) == pytest.approx(-math.sinh(1.0) / 2, abs=1e-6)
    assert a_of_t(dec, 0.0, 1) == pytest.approx(-0.5)


def test_a_asymptotic_gap():
    dec = decompose_gplus(Ohmic(3.0))
    t = 20 / dec.omega_r
    exact = a_of_t(dec, t)
    assert abs(exact - a_asymptotic(dec, t)) / abs(exact) < 1e-6


def test_degenerate_poles_rejected():
    from qkramers.errors import DegeneratePolesError

    with pytest.raises(DegeneratePolesError):
        decompose_gplus(Drude(1e-80, 1.0))


def test_a_asymptotic_prefactor():
    dec = decompose_gplus(Drude(1.0, 10.0))
    assert a_asymptotic(dec, 0.0) == -0.5 * dec.residue_r
