"""
Tests for mollification, the Friedrichs gap and the regularized slope bound.
"""

import math

import numpy as np
import pytest

from src.catalog import get_function, values_at
from src.errors import SupportError
from src.hopf import Point
from src.quadrature import make_grid
from src.regularize import (
    check_regularization,
    epsilon_zero,
    friedrichs_gap,
    gradient_l1_norm,
    kernel_constant,
    make_mollifier,
    mollified_eval,
    mollified_spec,
    regularized_slope_bound,
    sample_ball_points,
)


# ============================================================================
# Kernel
# ============================================================================

def test_kernel_and_mass():
    assert kernel_constant() > 0
    m = make_mollifier(0.01)
    assert m.mass == pytest.approx(1.0, abs=1e-12)
    assert 0.0 < m.second_moment < 1.0
    assert np.max(np.abs(m.offsets)) <= 1.0


def test_mollifier_rejects_nonpositive_epsilon():
    with pytest.raises(SupportError):
        make_mollifier(0.0)


def test_mollified_norm_squared_is_exact():
    m = make_mollifier(0.05)
    value = mollified_eval(get_function("norm-squared"), m, Point.from_complex(0.5, 0.0))
    assert value == pytest.approx(0.25 + 0.05 ** 2 * m.second_moment, rel=1e-12)


def test_mollified_log_norm_sits_above():
    m = make_mollifier(0.01)
    value = mollified_eval(get_function("log-norm"), m, Point.from_complex(0.3, 0.4j))
    assert math.log(0.5) <= value <= math.log(0.51)


def test_mollified_eval_support():
    m = make_mollifier(0.3)
    with pytest.raises(SupportError):
        mollified_eval(get_function("log-norm"), m, Point.from_complex(0.2, 0.0))
    with pytest.raises(SupportError):
        mollified_eval(get_function("log-norm"), m, Point.from_complex(0.8, 0.0))


def test_mollified_spec_matches_eval():
    m = make_mollifier(0.02)
    f = get_function("demailly-m2")
    spec = mollified_spec(f, m)
    p = Point.from_complex(0.2 + 0.1j, -0.3j)
    assert spec.s1_invariant
    assert float(values_at(spec, p.as_array()[None, :])[0]) == pytest.approx(mollified_eval(f, m, p))


# ============================================================================
# Friedrichs Gap
# ============================================================================

def test_gradient_l1_norm_of_log_norm():
    value, stderr = gradient_l1_norm(get_function("log-norm"), radius=0.9, n_samples=50000, seed=3)
    assert value == pytest.approx(2.0 * math.pi ** 2 * 0.9 ** 3 / 3.0, rel=2e-2)
    assert 0 < stderr < 0.05 * value


def test_friedrichs_gap_is_small():
    m = make_mollifier(0.05)
    p = Point.from_complex(0.3, 0.4j)
    gap = friedrichs_gap(get_function("norm-squared"), m, p)
    assert gap < 0.01
    assert friedrichs_gap(get_function("log-norm"), m, p) < 2.0 * 0.05 * 4.0


# ============================================================================
# Slope Bound
# ============================================================================

def test_epsilon_zero():
    assert epsilon_zero(2.0, 3.0) == pytest.approx(0.024894, abs=1e-6)
    assert epsilon_zero(2.0, 3.0, beta=0.5) == pytest.approx(0.5 * math.exp(-3.0) / 1.5)
    with pytest.raises(ValueError):
        epsilon_zero(2.0, 3.0, beta=1.0)


def test_regularized_slope_bound_radial():
    f = get_function("radial-a1")
    check = regularized_slope_bound(f, 2.0, 3.0, make_mollifier(0.01), make_grid(8, 8))
    assert check.passed
    assert check.M_A == pytest.approx(1.0)
    assert check.factor == 2.0
    assert check.C_fit >= 0.0
    assert check.M_B_eps <= check.bound


def test_sharpened_slope_bound():
    check = regularized_slope_bound(get_function("log-norm"), 2.0, 3.0, make_mollifier(0.01),
                                    make_grid(8, 8), beta=0.5)
    assert check.factor == 1.5
    assert check.passed


def test_slope_bound_window():
    with pytest.raises(SupportError):
        regularized_slope_bound(get_function("log-norm"), 2.0, 3.0, make_mollifier(0.03), make_grid(8, 8))
    with pytest.raises(SupportError):
        regularized_slope_bound(get_function("log-norm"), 3.0, 2.0, make_mollifier(0.01), make_grid(8, 8))


# ============================================================================
# Full Check
# ============================================================================

def test_sample_ball_points_stay_in_shell():
    z = sample_ball_points(200, np.random.default_rng(0))
    r = np.linalg.norm(z, axis=1)
    assert np.all((r >= 0.2) & (r <= 0.8))


def test_check_regularization_log_norm():
    report = check_regularization(get_function("log-norm"), [0.005, 0.01], make_grid(8, 8),
                                  n_monotone=20, n_friedrichs=5, seed=1)
    assert report.epsilons == (0.01, 0.005)
    assert report.monotone
    assert report.min_ordering_gap > 0
    assert report.friedrichs_passed
    assert len(report.slope_checks) == 2
    assert report.passed
    assert report.as_dict()["seed"] == 1


def test_check_regularization_skips_large_epsilon():
    report = check_regularization(get_function("log-norm"), [0.1], make_grid(8, 8),
                                  n_monotone=10, n_friedrichs=3, seed=2)
    assert report.slope_checks == ()
    assert report.epsilons == (0.1,)


def test_check_regularization_support():
    with pytest.raises(SupportError):
        check_regularization(get_function("log-norm"), [0.25], make_grid(8, 8))
