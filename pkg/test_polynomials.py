"""
Tests for the sparse polynomial type.
"""

import math

import numpy as np
import pytest

from src.errors import CatalogParseError
from src.polynomials import Polynomial, homogeneous_roots, vanishing_order


def test_parse_terms():
    p = Polynomial.parse("2*z1*z2+z2^3")
    assert p.terms == {(1, 1): 2.0, (0, 3): 1.0}
    assert p.min_degree == 2
    assert p.degree == 3
    assert not p.is_homogeneous
    assert p.leading_form() == Polynomial({(1, 1): 2.0})


def test_parse_rational_coefficient_and_constant():
    p = Polynomial.parse("1/2*z1^2-z2")
    assert p.terms == {(2, 0): 0.5, (0, 1): -1.0}
    q = Polynomial.parse("z1-1/2")
    assert q.terms == {(1, 0): 1.0, (0, 0): -0.5}


@pytest.mark.parametrize("text", ["", "z3", "2z1", "z1+*z2"])
def test_parse_rejects_malformed(text):
    with pytest.raises(CatalogParseError):
        Polynomial.parse(text)


def test_homogeneous_difference():
    p = Polynomial.parse("z2^5-z1^5")
    assert (p.degree, p.min_degree) == (5, 5)
    assert p.is_homogeneous
    assert not p.is_monomial


def test_arithmetic_and_derivative():
    z1 = Polynomial.monomial(1, 0)
    z2 = Polynomial.monomial(0, 1)
    p = (z1 ** 3) * z2
    assert p.derivative(0) == Polynomial({(2, 1): 3.0})
    assert p.derivative(1) == Polynomial({(3, 0): 1.0})
    assert (z1 + z2 - z1) == z2
    assert Polynomial.monomial(0, 2).derivative(0).is_zero


def test_evaluation_and_log_eval():
    p = Polynomial.parse("z2-z1^2")
    z = np.array([[0.3 + 0.1j, -0.2 + 0.4j]])
    value = p(z[:, 0], z[:, 1])
    assert value[0] == pytest.approx((-0.2 + 0.4j) - (0.3 + 0.1j) ** 2)

    t = -2.0
    with np.errstate(divide="ignore"):
        log_abs, arg = np.log(np.abs(z)), np.angle(z)
    magnitude, phase = p.log_eval(log_abs, arg, t)
    scaled = p(math.exp(t) * z[:, 0], math.exp(t) * z[:, 1])
    assert magnitude[0] == pytest.approx(math.log(abs(scaled[0])))
    assert phase[0] == pytest.approx(np.angle(scaled[0]))


def test_log_eval_survives_deep_scales():
    p = Polynomial.parse("z1")
    log_abs = np.array([[math.log(0.6), math.log(0.8)]])
    arg = np.zeros((1, 2))
    magnitude, _ = p.log_eval(log_abs, arg, -1000.0)
    assert magnitude[0] == pytest.approx(math.log(0.6) - 1000.0)


def test_homogeneous_roots():
    roots = homogeneous_roots(Polynomial.parse("z2-z1"))
    assert len(roots) == 1
    assert roots[0] == pytest.approx(np.array([1.0, 1.0]) / math.sqrt(2.0))

    axis_roots = homogeneous_roots(Polynomial.parse("z1*z2"))
    assert any(np.allclose(v, [1.0, 0.0]) for v in axis_roots)
    assert any(np.allclose(v, [0.0, 1.0]) for v in axis_roots)


def test_vanishing_order():
    p = Polynomial.parse("z2-z1^5")
    assert vanishing_order(p, np.array([1.0, 0.0]), 1e-8) == 5
    assert vanishing_order(p, np.array([0.0, 1.0]), 1e-8) == 1
    assert vanishing_order(Polynomial.parse("z1"), np.array([0.0, 1.0]), 1e-8) == math.inf


def test_compose_linear_identity_and_swap():
    p = Polynomial.parse("z1^2+3*z2")
    assert p.compose_linear(np.eye(2, dtype=complex)) == p
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    assert p.compose_linear(swap) == Polynomial({(0, 2): 1.0, (1, 0): 3.0})


def test_binomial_shift_flattens_graph():
    f = Polynomial.parse("z2-z1^5")
    p = Polynomial.parse("-z1^5")
    assert f.binomial_shift_z2(p) == Polynomial.monomial(0, 1)
