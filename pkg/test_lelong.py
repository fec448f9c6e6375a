"""
Tests for directional slopes, nu(0, r), nu(0), M_A(u) and lambda(0).
"""

import math

import pytest

from src.catalog import get_function
from src.constants import DEFAULT_A_SCHEDULE
from src.errors import DomainError, SpacingError
from src.hopf import Chart, Direction
from src.lelong import (
    EstimateMethod,
    default_schedule,
    directional_slope,
    exact_lambda,
    exact_lelong,
    lambda_origin,
    lelong_at_radius,
    lelong_number,
    max_directional,
)
from src.quadrature import make_grid


def test_directional_slope_of_log_norm():
    slope = directional_slope(get_function("log-norm"), Direction(Chart.ZETA, 0.5, 0.0), -3.0)
    assert slope == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        directional_slope(get_function("log-norm"), Direction(Chart.ZETA, 0.5, 0.0), 0.5)


def test_directional_slope_by_forward_differences():
    slope = directional_slope(get_function("log-plus-square"), Direction(Chart.XI, 0.2, 0.1), -20.0)
    assert slope == pytest.approx(1.0, abs=1e-6)


def test_lelong_at_radius_of_radial():
    assert lelong_at_radius(get_function("radial-a2"), -1.0, make_grid(16, 16)) == pytest.approx(2.0, rel=1e-12)


def test_max_directional_sits_on_the_pole():
    f = get_function("demailly-m2")
    assert max_directional(f, 2.0, make_grid(16, 16)) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(ValueError):
        max_directional(f, 0.0, make_grid(8, 8))


def test_exact_tails():
    f = get_function("demailly-m2")
    assert exact_lelong(f) == pytest.approx(0.5)
    assert exact_lambda(f) == pytest.approx(2.0)
    assert exact_lelong(get_function("norm-squared")) is None
    assert exact_lambda(get_function("coman-guedj-n5")) == pytest.approx(1.0)


def test_default_schedule_depths():
    analytic = default_schedule(get_function("log-norm"))
    assert analytic[0] == -2.0
    assert analytic[-1] == pytest.approx(-40.0)
    assert default_schedule(get_function("norm-squared"))[-1] == pytest.approx(-25.0)


def test_lelong_number_analytic_tail():
    est = lelong_number(get_function("radial-a2"), n_theta=16, n_phi=16)
    assert est.method is EstimateMethod.ANALYTIC_TAIL
    assert est.value == 2.0
    assert est.lower <= 2.0 <= est.upper
    assert est.converged


def test_lelong_number_demailly():
    est = lelong_number(get_function("demailly-m2"), n_theta=16, n_phi=16)
    assert est.value == pytest.approx(0.5)
    assert est.upper - est.lower < 1e-6


def test_lelong_number_grid_limit_for_custom():
    est = lelong_number(get_function("log-plus-square"), n_theta=16, n_phi=16)
    assert est.method is EstimateMethod.GRID_LIMIT
    assert est.value == pytest.approx(1.0, abs=1e-6)
    assert est.t_used == pytest.approx(-25.0)

    zero = lelong_number(get_function("norm-squared"), n_theta=16, n_phi=16)
    assert zero.value == pytest.approx(0.0, abs=1e-9)


def test_lelong_number_schedule_validation():
    with pytest.raises(SpacingError):
        lelong_number(get_function("log-norm"), schedule=[-2.0, -3.0])
    with pytest.raises(SpacingError):
        lelong_number(get_function("log-norm"), schedule=[-25.0, -2.0])


def test_lambda_origin():
    est = lambda_origin(get_function("demailly-m3"), DEFAULT_A_SCHEDULE, n_theta=16, n_phi=16)
    assert est.value == pytest.approx(3.0)
    assert est.lower <= 3.0 <= est.upper
    assert est.t_used == -20.0

    with pytest.raises(ValueError):
        lambda_origin(get_function("demailly-m3"), [2.0, 5.0])


def test_estimate_as_dict():
    est = lelong_number(get_function("log-norm"), n_theta=16, n_phi=16)
    info = est.as_dict()
    assert info["method"] == "AnalyticTail"
    assert set(info) == {"value", "lower", "upper", "t_used", "method", "converged"}
    assert math.isfinite(info["value"])


def test_lelong_at_radius_averages_fiber_phases():
    f = get_function("coman-guedj-n5")
    assert not f.s1_invariant
    assert lelong_at_radius(f, -10.0, make_grid(16, 16)) == pytest.approx(0.2, abs=1e-6)

    est = lelong_number(f, n_theta=16, n_phi=16)
    assert est.method is EstimateMethod.ANALYTIC_TAIL
    assert est.value == pytest.approx(0.2)
    assert est.upper - est.lower < 1e-6


@pytest.mark.parametrize("name, nu, lam", [
    ("u1-n5", 0.2, 1.0),
    ("u2-n5", 1.0, 1.0),
])
def test_u_family_lelong_numbers(name, nu, lam):
    f = get_function(name)
    assert lelong_number(f, n_theta=16, n_phi=16).value == pytest.approx(nu, abs=1e-3)
    assert lambda_origin(f, DEFAULT_A_SCHEDULE, n_theta=16, n_phi=16).value == pytest.approx(lam, abs=1e-2)
