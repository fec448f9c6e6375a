"""
Tests for the function catalog: resolution, evaluation, symmetry and the spec-file loader.
"""

import math

import numpy as np
import pytest

from src.catalog import (
    _find_common_zero,
    Kind,
    asymptotic_slope,
    check_s1_invariance,
    coman_guedj,
    critical_directions,
    evaluate,
    get_function,
    layer_rate,
    load_catalog,
    max_of_logs,
    normalize,
    parse_record,
    profile,
    radial,
    require_smooth,
    smoothed_surrogate,
    straightened,
)
from src.errors import CatalogParseError, CommonZeroError, DomainError, SmoothnessError, UnknownFunctionError
from src.hopf import Chart, Direction, Point
from src.polynomials import Polynomial


# ============================================================================
# Resolution and Evaluation
# ============================================================================

def test_get_function_families():
    f = get_function("demailly-m2")
    assert f.kind is Kind.HOLOMORPHIC_PAIR_LOG
    assert f.expected.lam == 2.0
    assert f.expected.nu == 0.5
    assert get_function("radial-a0.5").parameter == 0.5
    assert get_function("smoothed-max-1-2").expected.tau == 2.0


def test_unknown_function():
    with pytest.raises(UnknownFunctionError, match="unknown function"):
        get_function("no-such-member")


def test_evaluate_radial():
    f = radial(2.0)
    assert evaluate(f, Point.from_complex(0.5, 0.0)) == pytest.approx(2.0 * math.log(0.5))
    with pytest.raises(DomainError):
        evaluate(f, Point.from_complex(1.0, 0.0))
    with pytest.raises(DomainError):
        evaluate(f, Point(0.0, 0.0, 0.0, 0.0))


def test_profile_slope():
    sample = profile(radial(2.0), -1.0, Direction(Chart.ZETA, 0.3, 0.0))
    assert sample.u_dot == pytest.approx(2.0)
    assert sample.has_analytic_dot
    with pytest.raises(DomainError):
        profile(radial(2.0), 0.0, Direction(Chart.ZETA, 0.3, 0.0))


def test_require_smooth():
    with pytest.raises(SmoothnessError):
        require_smooth(max_of_logs([(1.0, "z1"), (1.0, "z2")]), "fiber functionals")
    require_smooth(get_function("demailly-m2"), "fiber functionals")


# ============================================================================
# Symmetry
# ============================================================================

def test_check_s1_invariance():
    assert check_s1_invariance(get_function("demailly-m2")).invariant
    verdict = check_s1_invariance(get_function("coman-guedj-n5"))
    assert not verdict.invariant
    assert verdict.label == "NotInvariant"
    with pytest.raises(ValueError):
        check_s1_invariance(get_function("log-norm"), n_samples=10)


def test_flags_agree_with_sampling():
    for name in ("log-norm", "u1-n5", "u2-n5", "smoothed-max-1-2", "norm-squared"):
        f = get_function(name)
        assert check_s1_invariance(f).invariant == f.s1_invariant


def test_normalize_shifts_down():
    f = normalize(get_function("norm-squared"))
    assert f.shift == pytest.approx(-2.0, abs=1e-9)
    assert normalize(get_function("log-norm")).shift == pytest.approx(-1.0, abs=1e-9)
    assert normalize(get_function("demailly-m2"), n_samples=256).shift == pytest.approx(-1.0, abs=1e-9)


# ============================================================================
# Critical Directions
# ============================================================================

def test_critical_directions():
    (v,) = critical_directions(get_function("demailly-m2"))
    assert abs(v[0]) == pytest.approx(0.0, abs=1e-12)
    assert abs(v[1]) == pytest.approx(1.0)

    (w,) = critical_directions(get_function("u1-n5"))
    assert abs(w[0]) == pytest.approx(1.0 / math.sqrt(2.0))
    assert abs(w[0] - w[1]) == pytest.approx(0.0, abs=1e-9)

    assert critical_directions(get_function("log-norm")) == []


def test_layer_rates():
    assert layer_rate(get_function("demailly-m2")) == pytest.approx(3.0)
    assert layer_rate(get_function("smoothed-max-1-2")) == pytest.approx(1.0)
    assert layer_rate(get_function("radial-a2")) == 0.0


def test_asymptotic_slope():
    f = get_function("demailly-m2")
    assert asymptotic_slope(f, np.array([0.0, 1.0])) == pytest.approx(2.0)
    assert asymptotic_slope(f, np.array([1.0, 0.0])) == pytest.approx(0.5)
    assert asymptotic_slope(get_function("norm-squared"), np.array([1.0, 0.0])) is None


# ============================================================================
# Surrogates and Shears
# ============================================================================

def test_smoothed_surrogate_flags():
    f = smoothed_surrogate("z1", "z2^4", 0.25)
    assert f.s1_invariant
    assert f.toric
    assert not smoothed_surrogate("z2-z1^2", "z2^2", 0.25).s1_invariant


def test_smoothed_surrogate_rejects_common_zero():
    with pytest.raises(CommonZeroError):
        smoothed_surrogate("z1-1/2", "z2", 1.0)


def test_coman_guedj_builds_without_common_zero():
    f = coman_guedj(5)
    assert f.kind is Kind.HOLOMORPHIC_PAIR_LOG
    assert not f.s1_invariant
    assert f.expected.tau == 1.0
    assert get_function("coman-guedj-n5").name == "coman-guedj-n5"
    for n in (2, 3, 7):
        assert coman_guedj(n).parameter == float(n)


def test_tiny_residual_on_one_curve_is_not_a_common_zero():
    # on z2 = z1^5 the second polynomial is |z1|^25, below float precision near |z1| = 0.2
    assert _find_common_zero(Polynomial.parse("z2-z1^5"), Polynomial.parse("z2^5")) is None
    zero = _find_common_zero(Polynomial.parse("z1-1/2"), Polynomial.parse("z2"))
    assert zero is not None
    assert zero[0] == pytest.approx(0.5, abs=1e-12)
    assert abs(zero[1]) < 1e-12


def test_straightened_coman_guedj():
    f = straightened(coman_guedj(5))
    assert f.form.terms[0].poly == Polynomial.monomial(0, 1)
    invariant = get_function("demailly-m2")
    assert straightened(invariant) is invariant


# ============================================================================
# Spec-file Loader
# ============================================================================

def test_parse_record():
    spec = parse_record("pair-m2 HolomorphicPairLog c=1/4 f=z1 g=z2^4  # demailly twin", 1)
    assert spec.name == "pair-m2"
    assert spec.s1_invariant
    assert spec.form.coef == pytest.approx(0.25)

    shifted = parse_record("sm SmoothedMax a=1 b=2 shift=-1")
    assert shifted.shift == -1.0

    tent = parse_record("tent MaxOfLogs c1=1 h1=z1 c2=2 h2=z2")
    assert tent.kind is Kind.MAX_OF_LOGS
    assert len(tent.branches) == 2

    assert parse_record("# only a comment") is None
    assert parse_record("   ") is None


@pytest.mark.parametrize("line", [
    "x Bogus a=1",
    "r Radial a=2 b=3",
    "r Radial a=two",
    "r Radial",
    "c Custom base=missing",
    "m MaxOfLogs c1=1",
])
def test_parse_record_errors(line):
    with pytest.raises(CatalogParseError) as info:
        parse_record(line, 7)
    assert info.value.line_number == 7
    assert str(info.value).startswith("line 7: ")
    assert not str(info.value).startswith("line 7: line 7")


def test_load_catalog(tmp_path):
    path = tmp_path / "members.txt"
    path.write_text(
        "# test members\n"
        "loaded-radial Radial a=3\n"
        "\n"
        "loaded-square Custom base=norm-squared\n",
        encoding="utf-8",
    )
    specs = load_catalog(path)
    assert [s.name for s in specs] == ["loaded-radial", "loaded-square"]
    assert get_function("loaded-radial").expected.tau == 9.0

    path.write_text("ok Radial a=1\nbad Radial\n", encoding="utf-8")
    with pytest.raises(CatalogParseError) as info:
        load_catalog(path, register_all=False)
    assert info.value.line_number == 2
