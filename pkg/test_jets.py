"""
Tests for the closed-form log-sum jets and the finite-difference engine.
"""

import numpy as np
import pytest

from src.jets import LogSumForm, LogSumTerm, finite_difference_jet, five_point, polar_parts
from src.polynomials import Polynomial

Z1 = Polynomial.monomial(1, 0)
Z2 = Polynomial.monomial(0, 1)


def _unit(v):
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


def test_five_point_on_parabola():
    d1, d2 = five_point([4.0, 1.0, 0.0, 1.0, 4.0], 1.0)
    assert d1 == 0.0
    assert d2 == 2.0


@pytest.mark.parametrize("t", [0.0, -3.0, -400.0])
def test_log_norm_jet_is_scale_free(t):
    form = LogSumForm(0.5, (LogSumTerm(Z1), LogSumTerm(Z2)))
    w = _unit([0.3 + 0.4j, -0.5 + 0.2j])
    log_abs, arg = polar_parts(w[None, :])
    jet = form.jet(log_abs, arg, t)

    assert jet.value[0] == pytest.approx(t, abs=1e-12)
    assert jet.grad[0] == pytest.approx(0.5 * np.conj(w), abs=1e-12)
    trace = np.real(jet.hess_mixed[0, 0, 0] + jet.hess_mixed[0, 1, 1])
    assert trace == pytest.approx(0.5, abs=1e-12)
    # two-term sums are maximal: det is exactly zero
    assert jet.det_mixed[0] == 0.0


def test_three_term_hessian_is_positive():
    form = LogSumForm(0.5, (LogSumTerm(Z1), LogSumTerm(Z2), LogSumTerm(Z1 * Z2)))
    w = _unit([0.6 + 0.1j, 0.2 - 0.7j])
    log_abs, arg = polar_parts(w[None, :])
    jet = form.jet(log_abs, arg, -1.0)

    eigenvalues = np.linalg.eigvalsh(jet.hess_mixed[0])
    assert np.all(eigenvalues >= -1e-14)
    assert jet.det_mixed[0] > 0
    assert jet.det_mixed[0] == pytest.approx(np.real(np.linalg.det(jet.hess_mixed[0])), rel=1e-10)


def test_closed_form_matches_finite_differences():
    form = LogSumForm(0.25, (LogSumTerm(Z1), LogSumTerm(Z2 ** 4)))
    z = np.array([[0.3 + 0.2j, -0.4 + 0.1j]])
    log_abs, arg = polar_parts(z)
    exact = form.jet(log_abs, arg)

    def u(z1, z2):
        return form.value(*polar_parts(np.stack([z1, z2], axis=-1)))

    approx = finite_difference_jet(u, z)
    assert approx.grad[0] == pytest.approx(exact.grad[0], abs=1e-7)
    assert approx.hess_mixed[0] == pytest.approx(exact.hess_mixed[0], abs=1e-5)
    assert approx.hess_holo[0] == pytest.approx(exact.hess_holo[0], abs=1e-5)


def test_finite_difference_jet_of_norm_squared():
    def u(z1, z2):
        return np.abs(z1) ** 2 + np.abs(z2) ** 2

    z = np.array([[0.3 + 0.1j, -0.2 + 0.4j]])
    jet = finite_difference_jet(u, z)
    assert jet.value[0] == pytest.approx(0.3)
    assert jet.grad[0] == pytest.approx(np.conj(z[0]), abs=1e-8)
    assert jet.hess_mixed[0] == pytest.approx(np.eye(2), abs=1e-5)
    assert jet.det_mixed[0] == pytest.approx(1.0, abs=1e-5)


def test_structure_flags_and_validation():
    toric = LogSumForm(0.5, (LogSumTerm(Z1), LogSumTerm(Z2 ** 3)))
    assert toric.is_toric
    assert toric.is_s1_invariant

    sheared = LogSumForm(0.5, (LogSumTerm(Z2 - Z1), LogSumTerm(Z2)))
    assert sheared.is_s1_invariant
    assert not sheared.is_toric

    mixed_degree = LogSumForm(0.5, (LogSumTerm(Z1 + Z2 ** 2), LogSumTerm(Z2)))
    assert not mixed_degree.is_s1_invariant
    assert not mixed_degree.is_toric

    with pytest.raises(ValueError):
        LogSumForm(0.5, ())
    with pytest.raises(ValueError):
        LogSumForm(0.5, (LogSumTerm(Z1, 0.5),))
