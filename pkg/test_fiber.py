"""
Tests for the fiber functionals I, J, E, cross and K and the 3-form path.
"""

import math

import numpy as np
import pytest

from src.catalog import get_function, max_of_logs
from src.errors import DomainError, SmoothnessError
from src.fiber import (
    dc_form_components,
    fiber_field,
    functionals,
    quasi_psh_defect,
    record_at,
    threeform_density,
    threeform_mass,
)
from src.hopf import RealHopf
from src.lelong import default_schedule
from src.quadrature import make_grid, prepare


@pytest.fixture(scope="module")
def small_grid():
    return make_grid(16, 16)


def test_log_norm_record(small_grid):
    rec = record_at(get_function("log-norm"), -3.0, small_grid)
    assert rec.I == pytest.approx(math.pi, rel=1e-12)
    assert rec.J == pytest.approx(math.pi, rel=1e-12)
    assert rec.K == pytest.approx(math.pi, rel=1e-12)
    assert rec.nu_r == pytest.approx(1.0, rel=1e-12)
    assert abs(rec.cross) < 1e-12
    assert abs(rec.E) < 1e-12
    assert rec.script_I == pytest.approx(-3.0 * math.pi, rel=1e-12)


@pytest.mark.parametrize("a", [0.5, 2.0])
def test_radial_record_scales_with_a(a, small_grid):
    rec = record_at(get_function(f"radial-a{a:g}"), -10.0, small_grid)
    assert rec.I == pytest.approx(a * math.pi, rel=1e-12)
    assert rec.K == pytest.approx(a * a * math.pi, rel=1e-12)


def test_weighted_norm_by_stencils(small_grid):
    t = -1.0
    rec = record_at(get_function("weighted-norm"), t, small_grid)
    scale = math.exp(4.0 * t)
    assert rec.I == pytest.approx(3.0 * math.pi * math.exp(2.0 * t), rel=1e-6)
    assert rec.J == pytest.approx(28.0 * math.pi * scale / 3.0, rel=1e-6)
    assert rec.cross == pytest.approx(-4.0 * math.pi * scale / 3.0, rel=1e-5)
    assert rec.K == pytest.approx(8.0 * math.pi * scale, rel=1e-5)
    assert rec.E == pytest.approx(math.pi * scale / 3.0, rel=1e-5)
    assert rec.E_grad == pytest.approx(rec.E, rel=1e-5)


@pytest.mark.parametrize("t", [-2.0, -6.0])
def test_demailly_mass_is_constant_and_matches_threeform(t):
    fc, g = prepare(get_function("demailly-m2"), -6.0)
    rec = record_at(fc, t, g)
    assert rec.K == pytest.approx(math.pi, rel=1e-6)
    assert threeform_mass(fc, t, g) == pytest.approx(rec.K, rel=1e-6)


def test_energy_forms_agree_for_smooth_max():
    fc, g = prepare(get_function("smoothed-max-1-2"), -4.0)
    rec = record_at(fc, -3.0, g)
    assert rec.E_grad == pytest.approx(rec.E, rel=1e-6)
    assert rec.K == pytest.approx(2.0 * math.pi, rel=1e-6)


def test_field_checks(small_grid):
    with pytest.raises(DomainError):
        fiber_field(get_function("log-norm"), 0.0, small_grid)
    with pytest.raises(SmoothnessError):
        fiber_field(max_of_logs([(1.0, "z1"), (2.0, "z2")]), -1.0, small_grid)

    field = fiber_field(get_function("log-norm"), -1.0, small_grid)
    with pytest.raises(ValueError):
        functionals(field, make_grid(8, 8))


def test_quasi_psh_defect_of_log_norm(small_grid):
    field = fiber_field(get_function("log-norm"), -2.0, small_grid)
    assert quasi_psh_defect(field) == pytest.approx(1.0, abs=1e-12)


def test_threeform_density_and_dc_components():
    f = get_function("log-norm")
    h = RealHopf(r=0.5, eta=0.7, theta=1.0, phi=0.3)
    assert threeform_density(f, h) == pytest.approx(math.cos(0.5) ** 4, rel=1e-12)

    ru_r, c_phi, c_theta = dc_form_components(f, h)
    assert ru_r == pytest.approx(1.0)
    assert c_phi == pytest.approx(-math.cos(1.0), abs=1e-12)
    assert c_theta == pytest.approx(0.0, abs=1e-12)


def test_fiber_field_shapes(small_grid):
    field = fiber_field(get_function("demailly-m1"), -2.0, small_grid)
    assert field.u.shape == (small_grid.size,)
    assert np.all(field.u_dot > 0)


@pytest.mark.parametrize("name", [
    "log-norm", "radial-a0.5", "demailly-m2", "demailly-m3", "u1-n5", "u2-n5",
    "smoothed-max-1-2", "norm-squared", "weighted-norm", "log-plus-square",
])
def test_j_over_pi_tends_to_nu_squared(name):
    f = get_function(name)
    t = max(-30.0, default_schedule(f)[-1])
    fc, g = prepare(f, t, 16, 16)
    rec = record_at(fc, t, g)
    assert abs(rec.J / math.pi - f.expected.nu ** 2) <= 1e-3
    assert rec.J >= rec.I ** 2 / math.pi * (1.0 - 1e-9)
