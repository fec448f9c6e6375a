"""
Function Catalog for pshlab
The library of test functions: evaluation of u, the radial profile u_t(zeta),
symmetry detection, normalization and the closed-form members with known
Lelong numbers and residual masses.
"""

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import root

from src.config import get_default_seed
from src.constants import (
    COMMON_ZERO_POLISH,
    COMMON_ZERO_TOL,
    DEEP_TAIL_T,
    FD_STEP_T,
    INVARIANCE_SAMPLES,
    INVARIANCE_TOL,
    NORMALIZE_RADIUS,
    NORMALIZE_TARGET,
    ROOT_MATCH_TOL,
    UNBOUNDED_LIMIT,
)
from src.errors import (
    CatalogParseError,
    CommonZeroError,
    DomainError,
    SmoothnessError,
    UnboundedAboveError,
    UnknownFunctionError,
)
from src.hopf import Direction, Point
from src.jets import Jet, LogSumForm, LogSumTerm, finite_difference_jet, five_point, polar_parts
from src.logger import setup_logger
from src.polynomials import Polynomial, homogeneous_roots, vanishing_order

logger = setup_logger(__name__)


# ============================================================================
# Domain Types
# ============================================================================

class Kind(str, Enum):
    RADIAL = "Radial"
    HOLOMORPHIC_PAIR_LOG = "HolomorphicPairLog"
    MAX_OF_LOGS = "MaxOfLogs"
    SMOOTHED_MAX = "SmoothedMax"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class ExpectedValues:
    """Closed-form Lelong number, maximal directional Lelong number and residual mass."""
    nu: float
    lam: float
    tau: float


@dataclass(frozen=True)
class CustomFunction:
    """A vectorized u(z1, z2) without closed-form derivatives."""
    key: str
    u: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(compare=False)
    description: str = ""


@dataclass(frozen=True)
class FunctionSpec:
    """
    A catalog entry.

    Log-sum kinds (Radial, HolomorphicPairLog, SmoothedMax) carry a LogSumForm,
    MaxOfLogs carries its branches (c_k, h_k), Custom carries a callable.
    """
    name: str
    kind: Kind
    parameters: Tuple[Tuple[str, float], ...] = ()
    s1_invariant: bool = False
    toric: bool = False
    smooth_off_origin: bool = True
    shift: float = 0.0
    form: Optional[LogSumForm] = None
    branches: Tuple[Tuple[float, Polynomial], ...] = ()
    custom: Optional[CustomFunction] = None
    expected: Optional[ExpectedValues] = None

    @property
    def has_analytic_jets(self) -> bool:
        return self.form is not None

    @property
    def parameter(self) -> Optional[float]:
        """First kind parameter, used as the sweep variable."""
        return self.parameters[0][1] if self.parameters else None

    def describe(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "parameters": {k: v for k, v in self.parameters},
            "s1_invariant": self.s1_invariant,
            "toric": self.toric,
            "smooth_off_origin": self.smooth_off_origin,
            "shift": self.shift,
        }


@dataclass(frozen=True)
class ProfileSample:
    t: float
    d: Direction
    u: float
    u_dot: float
    has_analytic_dot: bool


@dataclass(frozen=True)
class InvarianceVerdict:
    invariant: bool
    max_violation: float

    @property
    def label(self) -> str:
        return "Invariant" if self.invariant else "NotInvariant"


# ============================================================================
# Evaluation
# ============================================================================

def values_at(f: FunctionSpec, z: np.ndarray) -> np.ndarray:
    """
    Raw vectorized evaluation of u at points z of shape (N, 2); no domain checks.

    Returns:
        Array (N,) including the spec shift
    """
    z = np.asarray(z, dtype=complex).reshape(-1, 2)
    if f.form is not None:
        log_abs, arg = polar_parts(z)
        return f.form.value(log_abs, arg) + f.shift
    if f.kind is Kind.MAX_OF_LOGS:
        log_abs, arg = polar_parts(z)
        return _max_of_logs(f, log_abs, arg, 0.0) + f.shift
    return np.asarray(f.custom.u(z[:, 0], z[:, 1]), dtype=float) + f.shift


def values_on_sphere(f: FunctionSpec, t: float, w: np.ndarray) -> np.ndarray:
    """u(e^t w) for unit vectors w of shape (N, 2), exact at any depth for analytic kinds."""
    w = np.asarray(w, dtype=complex).reshape(-1, 2)
    if f.form is not None:
        log_abs, arg = polar_parts(w)
        return f.form.value(log_abs, arg, t) + f.shift
    if f.kind is Kind.MAX_OF_LOGS:
        log_abs, arg = polar_parts(w)
        return _max_of_logs(f, log_abs, arg, t) + f.shift
    z = math.exp(t) * w
    return np.asarray(f.custom.u(z[:, 0], z[:, 1]), dtype=float) + f.shift


def jet_at(f: FunctionSpec, w: np.ndarray, t: float = 0.0) -> Jet:
    """
    Jet of u at z = e^t w with derivatives scaled by e^t and e^{2t}.

    Log-sum kinds use the closed form (any depth), Custom kinds 4D central differences.

    Raises:
        SmoothnessError: For MaxOfLogs
    """
    require_smooth(f, "A complex Hessian")
    w = np.asarray(w, dtype=complex).reshape(-1, 2)
    if f.form is not None:
        log_abs, arg = polar_parts(w)
        return f.form.jet(log_abs, arg, t)

    def u(z1, z2):
        return values_at(f, np.stack([z1, z2], axis=-1))

    return finite_difference_jet(u, math.exp(t) * w, t)


def _max_of_logs(f: FunctionSpec, log_abs, arg, t) -> np.ndarray:
    branches = [c * poly.log_eval(log_abs, arg, t)[0] for c, poly in f.branches]
    return np.max(np.stack(branches), axis=0)


def evaluate(f: FunctionSpec, p: Point) -> float:
    """
    Evaluate u at a point of the punctured unit ball.

    Args:
        f: Catalog entry
        p: Point with 0 < r(p) < 1

    Returns:
        u(p)

    Raises:
        DomainError: If r(p) = 0 or r(p) >= 1

    Note:
        For S1-invariant entries the point is first moved along its circle to
        z2 >= 0, so the value depends on (t, zeta) only.
    """
    r = p.r
    if r == 0 or r >= 1:
        raise DomainError(f"❌ Point outside the punctured unit ball (r={r:g})")
    z = p.as_array()
    if f.s1_invariant and abs(z[1]) > 0:
        z = z * (np.conj(z[1]) / abs(z[1]))
    return float(values_at(f, z[None, :])[0])


def _line_values(f: FunctionSpec, t: float, v: np.ndarray, steps: Sequence[float]) -> List[np.ndarray]:
    return [values_on_sphere(f, t + s, v) for s in steps]


def line_profile(f: FunctionSpec, t: float, vectors: np.ndarray) -> Tuple[np.ndarray, np.ndarray, bool]:
    """
    u and u_dot along the lines spanned by unit vectors at log-radius t.

    Returns:
        Tuple (u, u_dot, has_analytic_dot)
    """
    v = np.asarray(vectors, dtype=complex).reshape(-1, 2)
    if f.form is not None:
        log_abs, arg = polar_parts(v)
        jet = f.form.jet(log_abs, arg, t)
        u_dot = 2.0 * np.real(np.sum(jet.grad * v, axis=-1))
        if t < DEEP_TAIL_T:
            u_dot = np.array([asymptotic_slope(f, vec) for vec in v])
        return jet.value + f.shift, u_dot, True

    h = FD_STEP_T
    samples = _line_values(f, t, v, (-2 * h, -h, 0.0, h, 2 * h))
    u_dot, _ = five_point(samples, h)
    return samples[2], u_dot, False


def profile(f: FunctionSpec, t: float, d: Direction) -> ProfileSample:
    """
    Radial profile of u along the complex line through d.

    Args:
        f: Catalog entry
        t: Log-radius, t < 0
        d: Direction of the line

    Returns:
        ProfileSample with u = u(e^t v) and u_dot its t-derivative

    Raises:
        DomainError: If t >= 0

    Examples:
        >>> round(profile(radial(2.0), -1.0, Direction(Chart.ZETA, 0.3, 0.0)).u_dot, 12)
        2.0
    """
    if not t < 0:
        raise DomainError(f"❌ Profile needs t < 0 (got {t:g})")
    u, u_dot, analytic = line_profile(f, t, d.unit_vector()[None, :])
    return ProfileSample(t=t, d=d, u=float(u[0]), u_dot=float(u_dot[0]), has_analytic_dot=analytic)


def require_smooth(f: FunctionSpec, operation: str):
    if f.kind is Kind.MAX_OF_LOGS or not f.smooth_off_origin:
        raise SmoothnessError(
            f"❌ {operation} needs second derivatives; {f.name} ({f.kind.value}) is not smooth. "
            f"Use smoothed_surrogate instead"
        )


# ============================================================================
# Symmetry and Normalization
# ============================================================================

def _random_ball_points(rng: np.random.Generator, n: int, r_min: float = 0.01,
                        r_max: float = 0.99) -> np.ndarray:
    x = rng.standard_normal((n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    r = rng.uniform(r_min, r_max, size=n)[:, None]
    return r * (x[:, 0::2] + 1j * x[:, 1::2])


def check_s1_invariance(f: FunctionSpec, n_samples: int = INVARIANCE_SAMPLES,
                        tol: float = INVARIANCE_TOL, seed: Optional[int] = None) -> InvarianceVerdict:
    """
    Sample the circle action on random points of B1.

    Returns:
        Invariant iff max |u(e^{i a} p) - u(p)| <= tol (1 + |u(p)|) over all samples

    Examples:
        >>> check_s1_invariance(get_function("coman-guedj-n5")).invariant
        False
    """
    if n_samples < 100:
        raise ValueError(f"❌ Invariance check needs n_samples >= 100 (got {n_samples})")
    rng = np.random.default_rng(get_default_seed() if seed is None else seed)
    z = _random_ball_points(rng, n_samples)
    angle = rng.uniform(0.0, 2.0 * math.pi, size=n_samples)
    base = values_at(f, z)
    moved = values_at(f, z * np.exp(1j * angle)[:, None])
    violation = np.abs(moved - base) / (1.0 + np.abs(base))
    worst = float(np.max(violation))
    verdict = InvarianceVerdict(invariant=worst <= tol, max_violation=worst)
    logger.debug(f"{f.name}: {verdict.label} (max violation {worst:.3e})")
    return verdict


def _sphere_probe(f: FunctionSpec, n_samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = _random_ball_points(rng, n_samples, 1.0, 1.0)
    extra = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    extra += [np.asarray(v) for v in critical_directions(f)]
    return np.concatenate([z, np.array(extra, dtype=complex)]) * NORMALIZE_RADIUS


def normalize(f: FunctionSpec, n_samples: int = 4096, seed: Optional[int] = None) -> FunctionSpec:
    """
    Shift f so that its sampled supremum over B1 is at most -1.

    Note:
        Plurisubharmonic functions attain their sup over the ball on the boundary
        sphere, so the sample lives on |z| = NORMALIZE_RADIUS plus the coordinate
        poles and critical directions.

    Raises:
        UnboundedAboveError: If the sampled supremum is not finite
    """
    z = _sphere_probe(f, n_samples, get_default_seed() if seed is None else seed)
    top = float(np.max(values_at(f, z)))
    if not np.isfinite(top) or top > UNBOUNDED_LIMIT:
        raise UnboundedAboveError(f"❌ {f.name} is not bounded above on B1 (sampled sup {top:g})")
    if top <= NORMALIZE_TARGET:
        return f
    return replace(f, shift=f.shift - (top - NORMALIZE_TARGET))


# ============================================================================
# Critical Directions and Asymptotic Slopes
# ============================================================================

def _weighted_terms(f: FunctionSpec) -> Tuple[float, List[Tuple[Polynomial, float]]]:
    """(slope factor, [(h_k, weight_k)]) so that slopes are factor * min_k weight_k ord_k."""
    if f.form is not None:
        return 2.0 * f.form.coef, [(term.poly, term.power) for term in f.form.terms]
    if f.kind is Kind.MAX_OF_LOGS:
        return 1.0, [(poly, c) for c, poly in f.branches]
    return 0.0, []


def _same_line(v: np.ndarray, w: np.ndarray) -> bool:
    return abs(v[0] * w[1] - v[1] * w[0]) < 1e-9


def critical_directions(f: FunctionSpec) -> List[np.ndarray]:
    """
    Unit vectors along which every term of minimal weighted order loses order.

    These are the directions whose slopes exceed the generic Lelong slope;
    around them u_t develops a boundary layer of width ~ e^{rate * t}.
    """
    _, terms = _weighted_terms(f)
    if not terms:
        return []
    kappa = min(w * poly.min_degree for poly, w in terms)
    active = [poly for poly, w in terms if abs(w * poly.min_degree - kappa) < 1e-12]
    if kappa == 0:
        return []

    found: List[np.ndarray] = []
    for v in homogeneous_roots(active[0].leading_form()):
        if any(_same_line(v, w) for w in found):
            continue
        vanishes = True
        for poly in active:
            form = poly.leading_form()
            if abs(complex(form(v[0], v[1]))) > ROOT_MATCH_TOL * form.coefficient_norm():
                vanishes = False
                break
        if vanishes:
            found.append(v)
    return found


def layer_rate(f: FunctionSpec) -> float:
    """Exponential rate of the narrowest boundary layer of u_t in x = log tan(theta/2)."""
    _, terms = _weighted_terms(f)
    if not terms or not critical_directions(f):
        return 0.0
    kappa_min = min(w * poly.min_degree for poly, w in terms)
    kappa_max = max(w * poly.degree for poly, w in terms)
    return kappa_max / kappa_min - 1.0


def asymptotic_slope(f: FunctionSpec, v: np.ndarray) -> Optional[float]:
    """
    Exact limit of the t-slope of u along the line through v as t -> -infinity.

    Returns:
        factor * min_k weight_k * ord_k(v), or None for Custom kinds
    """
    factor, terms = _weighted_terms(f)
    if not terms:
        return None
    orders = [w * vanishing_order(poly, np.asarray(v), ROOT_MATCH_TOL) for poly, w in terms]
    return float(factor * min(orders))


def is_polar(v: np.ndarray) -> bool:
    return abs(v[0]) < 1e-12 or abs(v[1]) < 1e-12


def centered(f: FunctionSpec) -> FunctionSpec:
    """
    Rotate f by a unitary map sending its critical direction to the pole zeta = 0.

    The rotation commutes with the circle action and preserves every mass,
    Lelong number and sphere integral; it only moves the boundary layer to
    where the log-polar grid resolves it.
    """
    if f.form is None:
        return f
    moving = [v for v in critical_directions(f) if not is_polar(v)]
    if not moving:
        return f
    if len(moving) > 1:
        logger.warning(f"{f.name}: {len(moving)} non-polar critical directions, centering the first")
    v1, v2 = moving[0]
    U = np.array([[np.conj(v2), v1], [-np.conj(v1), v2]], dtype=complex)
    form = f.form.compose(lambda poly: poly.compose_linear(U))
    return replace(f, form=form, toric=form.is_toric)


def _shear_part(poly: Polynomial) -> Optional[Tuple[complex, Polynomial]]:
    """(a, P) if poly = a z2 + P(z1) with deg P >= 2 and P(0) = 0."""
    a = poly.terms.get((0, 1))
    if a is None:
        return None
    rest = {e: c for e, c in poly.terms.items() if e != (0, 1)}
    if not rest or any(j != 0 or i == 0 for i, j in rest):
        return None
    p = Polynomial(rest)
    return (a, p) if p.degree >= 2 else None


def straightened(f: FunctionSpec) -> FunctionSpec:
    """
    Compose f with the shear (z1, w2) -> (z1, (w2 - P(z1)) / a) that flattens a
    term a z2 + P(z1) onto the axis w2 = 0.

    Only mass at the origin survives for these members, so MA(B_r) is unchanged.
    """
    if f.form is None or f.s1_invariant:
        return f
    for term in f.form.terms:
        shear = _shear_part(term.poly)
        if shear is not None:
            a, p = shear
            form = f.form.compose(lambda poly: poly.binomial_shift_z2(p, a))
            logger.debug(f"{f.name}: straightened along z2 = {p}")
            return replace(f, form=form)
    return f


# ============================================================================
# Constructors
# ============================================================================

Z1 = Polynomial.monomial(1, 0)
Z2 = Polynomial.monomial(0, 1)


@lru_cache(maxsize=64)
def _find_common_zero(fp: Polynomial, gp: Polynomial, r_inner: float = 0.1,
                       r_outer: float = 0.999) -> Optional[Tuple[complex, complex]]:
    """
    Search the shell r_inner < |z| < r_outer for a common zero of f and g.

    Starting from the shell points where |f|^2 + |g|^2 is smallest, solve f = g = 0
    as a real 4x4 system and polish with a few Newton steps. A converged point counts
    only when it lies within COMMON_ZERO_TOL * |z| of the zero set of f and of g,
    judged by |p| / |grad p|. A small residual alone is not enough: on f = 0 the
    pair (z2 - z1^5, z2^5) has |g| = |z1|^25 far below float precision while the
    zero set of g stays about |z2| / 5 away.

    Returns:
        The located point or None
    """
    rng = np.random.default_rng(0)
    x = rng.standard_normal((4096, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    radii = np.linspace(r_inner, r_outer, 8)
    z = (radii[:, None, None] * (x[None, :, 0::2] + 1j * x[None, :, 1::2])).reshape(-1, 2)
    grads = [(p.derivative(0), p.derivative(1)) for p in (fp, gp)]

    def system(y: np.ndarray):
        q1, q2 = y[0] + 1j * y[1], y[2] + 1j * y[3]
        values = [complex(p(q1, q2)) for p in (fp, gp)]
        jac = np.zeros((4, 4))
        for row, (d1, d2) in enumerate(grads):
            for col, dp in enumerate((d1, d2)):
                slope = complex(dp(q1, q2))
                # Cauchy-Riemann block of a holomorphic derivative
                jac[2 * row:2 * row + 2, 2 * col:2 * col + 2] = [[slope.real, -slope.imag],
                                                                  [slope.imag, slope.real]]
        residual = np.array([values[0].real, values[0].imag, values[1].real, values[1].imag])
        return residual, jac

    def zero_set_distance(p: Polynomial, d1: Polynomial, d2: Polynomial, q1: complex, q2: complex):
        value = abs(complex(p(q1, q2)))
        if value == 0.0:
            return 0.0
        slope = math.hypot(abs(complex(d1(q1, q2))), abs(complex(d2(q1, q2))))
        return value / slope if slope > 0.0 else math.inf

    level = np.abs(fp(z[:, 0], z[:, 1])) ** 2 + np.abs(gp(z[:, 0], z[:, 1])) ** 2
    for index in np.argsort(level)[:6]:
        start = np.array([z[index, 0].real, z[index, 0].imag, z[index, 1].real, z[index, 1].imag])
        result = root(system, start, jac=True, method="hybr")
        if not result.success:
            continue
        y = result.x
        for _ in range(COMMON_ZERO_POLISH):
            residual, jac = system(y)
            y = y - np.linalg.lstsq(jac, residual, rcond=None)[0]
        r = float(np.linalg.norm(y))
        if not (0.5 * r_inner < r < 1.0):
            continue
        q1, q2 = complex(y[0], y[1]), complex(y[2], y[3])
        distance = max(zero_set_distance(p, d1, d2, q1, q2) for p, (d1, d2) in zip((fp, gp), grads))
        if distance <= COMMON_ZERO_TOL * r:
            return q1, q2
        logger.debug(f"Rejected near-zero of ({fp}, {gp}) at |z|={r:.3g}: "
                     f"a zero set is {distance:.2e} away")
    return None


def smoothed_surrogate(f: Union[str, Polynomial], g: Union[str, Polynomial], coef: float,
                       name: Optional[str] = None,
                       parameters: Tuple[Tuple[str, float], ...] = (),
                       expected: Optional[ExpectedValues] = None) -> FunctionSpec:
    """
    Build u = coef * log(|f|^2 + |g|^2).

    Args:
        f, g: Polynomials (or their text form) with no common zero in B1 except 0
        coef: Positive coefficient c

    Returns:
        FunctionSpec of kind HolomorphicPairLog, flagged s1_invariant when f and g
        are homogeneous and toric when both are monomials

    Raises:
        CommonZeroError: If a common zero is found on the search shell

    Examples:
        >>> smoothed_surrogate("z1", "z2^4", 0.25).s1_invariant
        True
    """
    fp = Polynomial.parse(f) if isinstance(f, str) else f
    gp = Polynomial.parse(g) if isinstance(g, str) else g
    zero = _find_common_zero(fp, gp)
    if zero is not None:
        raise CommonZeroError(f"❌ f={fp} and g={gp} share a zero near {zero} inside B1")
    form = LogSumForm(float(coef), (LogSumTerm(fp), LogSumTerm(gp)))
    return FunctionSpec(
        name=name or f"pair({fp};{gp};{coef:g})",
        kind=Kind.HOLOMORPHIC_PAIR_LOG,
        parameters=parameters or (("c", float(coef)),),
        s1_invariant=form.is_s1_invariant,
        toric=form.is_toric,
        form=form,
        expected=expected,
    )


def radial(a: float, name: Optional[str] = None) -> FunctionSpec:
    """a log|z| written as (a/2) log(|z1|^2 + |z2|^2)."""
    form = LogSumForm(0.5 * a, (LogSumTerm(Z1), LogSumTerm(Z2)))
    return FunctionSpec(
        name=name or f"radial-a{a:g}", kind=Kind.RADIAL, parameters=(("a", float(a)),),
        s1_invariant=True, toric=True, form=form,
        expected=ExpectedValues(nu=a, lam=a, tau=a * a),
    )


def smoothed_max(a: float, b: float, name: Optional[str] = None) -> FunctionSpec:
    """(1/2) log(|z1|^{2a} + |z2|^{2b}), the smooth rendition of max{a log|z1|, b log|z2|}."""
    if a < 1 or b < 1:
        raise ValueError(f"❌ SmoothedMax needs a, b >= 1 (got a={a:g}, b={b:g})")
    form = LogSumForm(0.5, (LogSumTerm(Z1, float(a)), LogSumTerm(Z2, float(b))))
    return FunctionSpec(
        name=name or f"smoothed-max-{a:g}-{b:g}", kind=Kind.SMOOTHED_MAX,
        parameters=(("a", float(a)), ("b", float(b))),
        s1_invariant=True, toric=True, form=form,
        expected=ExpectedValues(nu=min(a, b), lam=max(a, b), tau=a * b),
    )


def max_of_logs(branches: Sequence[Tuple[float, Union[str, Polynomial]]],
                name: str = "max-of-logs") -> FunctionSpec:
    """max_k c_k log|h_k|; evaluable and sliceable, but without second derivatives."""
    parsed = tuple((float(c), Polynomial.parse(h) if isinstance(h, str) else h) for c, h in branches)
    return FunctionSpec(
        name=name, kind=Kind.MAX_OF_LOGS,
        parameters=tuple((f"c{k + 1}", c) for k, (c, _) in enumerate(parsed)),
        s1_invariant=all(h.is_homogeneous for _, h in parsed),
        toric=all(h.is_monomial for _, h in parsed),
        smooth_off_origin=False, branches=parsed,
    )


def demailly(m: int) -> FunctionSpec:
    """(1/2m) log(|z1|^2 + |z2|^{2 m^2}): nu = 1/m, lambda = m, tau = 1."""
    return smoothed_surrogate(Z1, Z2 ** (m * m), 1.0 / (2 * m), name=f"demailly-m{m}",
                              parameters=(("m", float(m)),),
                              expected=ExpectedValues(nu=1.0 / m, lam=float(m), tau=1.0))


def u1(n: int) -> FunctionSpec:
    """(1/2n) log(|z2 - z1|^2 + |z2^n|^2): nu = 1/n, lambda = 1, tau = 1/n."""
    return smoothed_surrogate(Z2 - Z1, Z2 ** n, 1.0 / (2 * n), name=f"u1-n{n}",
                              parameters=(("n", float(n)),),
                              expected=ExpectedValues(nu=1.0 / n, lam=1.0, tau=1.0 / n))


def u2(n: int) -> FunctionSpec:
    """(1/2n) log(|z2^n - z1^n|^2 + |z2^n|^2): nu = lambda = tau = 1."""
    return smoothed_surrogate(Z2 ** n - Z1 ** n, Z2 ** n, 1.0 / (2 * n), name=f"u2-n{n}",
                              parameters=(("n", float(n)),),
                              expected=ExpectedValues(nu=1.0, lam=1.0, tau=1.0))


def coman_guedj(n: int) -> FunctionSpec:
    """(1/2n) log(|z2 - z1^n|^2 + |z2^n|^2): not S1-invariant, tau = 1 > 2 lambda nu + nu^2."""
    return smoothed_surrogate(Z2 - Z1 ** n, Z2 ** n, 1.0 / (2 * n), name=f"coman-guedj-n{n}",
                              parameters=(("n", float(n)),),
                              expected=ExpectedValues(nu=1.0 / n, lam=1.0, tau=1.0))


def _norm_squared(z1, z2):
    return np.abs(z1) ** 2 + np.abs(z2) ** 2


def _weighted_norm(z1, z2):
    return np.abs(z1) ** 2 + 2.0 * np.abs(z2) ** 2


def _log_plus_square(z1, z2):
    s = np.abs(z1) ** 2 + np.abs(z2) ** 2
    with np.errstate(divide="ignore"):
        return 0.5 * np.log(s) + s


CUSTOM_REGISTRY: Dict[str, Tuple[CustomFunction, ExpectedValues]] = {
    "norm-squared": (CustomFunction("norm-squared", _norm_squared, "|z|^2"),
                     ExpectedValues(nu=0.0, lam=0.0, tau=0.0)),
    "weighted-norm": (CustomFunction("weighted-norm", _weighted_norm, "|z1|^2 + 2|z2|^2"),
                      ExpectedValues(nu=0.0, lam=0.0, tau=0.0)),
    "log-plus-square": (CustomFunction("log-plus-square", _log_plus_square, "log|z| + |z|^2"),
                        ExpectedValues(nu=1.0, lam=1.0, tau=1.0)),
}


def custom(key: str, name: Optional[str] = None) -> FunctionSpec:
    """A registered Custom member; every registered function depends on |z1|, |z2| only."""
    if key not in CUSTOM_REGISTRY:
        raise UnknownFunctionError(f"unknown function {key!r}: no Custom entry under that key")
    fn, expected = CUSTOM_REGISTRY[key]
    return FunctionSpec(name=name or key, kind=Kind.CUSTOM, s1_invariant=True, toric=True,
                        custom=fn, expected=expected)


def wrap_custom(name: str, u: Callable[[np.ndarray, np.ndarray], np.ndarray],
                s1_invariant: bool = False, toric: bool = False) -> FunctionSpec:
    """A Custom spec around an arbitrary vectorized callable."""
    return FunctionSpec(name=name, kind=Kind.CUSTOM, s1_invariant=s1_invariant, toric=toric,
                        custom=CustomFunction(name, u))


# ============================================================================
# Default Catalog and Families
# ============================================================================

DEFAULT_NAMES = (
    "log-norm", "radial-a0.5", "radial-a1", "radial-a2",
    "demailly-m1", "demailly-m2", "demailly-m3",
    "u1-n5", "u2-n5", "coman-guedj-n5", "smoothed-max-1-2",
    "norm-squared", "weighted-norm", "log-plus-square",
)

_NUMBER = r"(\d+(?:\.\d+)?)"
_FAMILIES: Tuple[Tuple[str, Callable[..., FunctionSpec]], ...] = (
    (rf"radial-a{_NUMBER}", lambda a: radial(float(a))),
    (r"demailly-m(\d+)", lambda m: demailly(int(m))),
    (r"u1-n(\d+)", lambda n: u1(int(n))),
    (r"u2-n(\d+)", lambda n: u2(int(n))),
    (r"coman-guedj-n(\d+)", lambda n: coman_guedj(int(n))),
    (rf"smoothed-max-{_NUMBER}-{_NUMBER}", lambda a, b: smoothed_max(float(a), float(b))),
)

_EXTRA: Dict[str, FunctionSpec] = {}


def register(f: FunctionSpec):
    """Make a spec (e.g. loaded from a spec file) resolvable by name."""
    _EXTRA[f.name] = f


def get_function(name: str) -> FunctionSpec:
    """
    Resolve a catalog name, including parametric families such as demailly-m4.

    Raises:
        UnknownFunctionError: "unknown function" when nothing matches

    Examples:
        >>> get_function("demailly-m2").expected.lam
        2.0
    """
    if name in _EXTRA:
        return _EXTRA[name]
    if name == "log-norm":
        return radial(1.0, name="log-norm")
    if name in CUSTOM_REGISTRY:
        return custom(name)
    for pattern, build in _FAMILIES:
        match = re.fullmatch(pattern, name)
        if match:
            return build(*match.groups())
    raise UnknownFunctionError(f"unknown function {name!r}")


def default_catalog() -> List[FunctionSpec]:
    return [get_function(name) for name in DEFAULT_NAMES]


# ============================================================================
# Spec-file Loader
# ============================================================================

_KIND_KEYS = {
    Kind.RADIAL: {"a"},
    Kind.HOLOMORPHIC_PAIR_LOG: {"c", "f", "g"},
    Kind.SMOOTHED_MAX: {"a", "b"},
    Kind.CUSTOM: {"base"},
}


def _at_line(exc: Exception, line_number: int) -> CatalogParseError:
    if isinstance(exc, CatalogParseError) and exc.line_number:
        return exc
    return CatalogParseError(str(exc), line_number)


def _number(text: str, line_number: int) -> float:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise CatalogParseError(f"❌ Not a number: {text!r}", line_number)


def parse_record(line: str, line_number: int = 0) -> Optional[FunctionSpec]:
    """
    Parse one spec-file line `name kind key=value ...` (see CATALOG_FORMAT.md).

    Returns:
        FunctionSpec, or None for blank and comment lines
    """
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    tokens = body.split()
    if len(tokens) < 2:
        raise CatalogParseError("❌ Expected `name kind key=value ...`", line_number)
    name, kind_text = tokens[0], tokens[1]
    try:
        kind = Kind(kind_text)
    except ValueError:
        raise CatalogParseError(f"❌ Unknown kind {kind_text!r}", line_number)

    values: Dict[str, str] = {}
    for token in tokens[2:]:
        if "=" not in token:
            raise CatalogParseError(f"❌ Expected key=value, got {token!r}", line_number)
        key, value = token.split("=", 1)
        values[key] = value
    shift = _number(values.pop("shift"), line_number) if "shift" in values else 0.0

    if kind is Kind.MAX_OF_LOGS:
        index = sorted({k[1:] for k in values if re.fullmatch(r"[ch]\d+", k)}, key=int)
        unknown = set(values) - {f"c{i}" for i in index} - {f"h{i}" for i in index}
        if unknown or not index:
            raise CatalogParseError(f"❌ MaxOfLogs takes c1=.. h1=.. pairs (got {sorted(values)})",
                                    line_number)
        try:
            branches = [(_number(values[f"c{i}"], line_number), Polynomial.parse(values[f"h{i}"]))
                        for i in index]
        except KeyError as missing:
            raise CatalogParseError(f"❌ MaxOfLogs branch without {missing.args[0]}", line_number)
        except CatalogParseError as exc:
            raise _at_line(exc, line_number)
        return replace(max_of_logs(branches, name=name), shift=shift)

    expected_keys = _KIND_KEYS[kind]
    if set(values) != expected_keys:
        raise CatalogParseError(
            f"❌ {kind.value} takes keys {sorted(expected_keys)} (got {sorted(values)})", line_number)

    try:
        if kind is Kind.RADIAL:
            spec = radial(_number(values["a"], line_number), name=name)
        elif kind is Kind.SMOOTHED_MAX:
            spec = smoothed_max(_number(values["a"], line_number), _number(values["b"], line_number),
                                name=name)
        elif kind is Kind.CUSTOM:
            spec = custom(values["base"], name=name)
        else:
            spec = smoothed_surrogate(values["f"], values["g"], _number(values["c"], line_number),
                                      name=name)
    except (CatalogParseError, CommonZeroError, UnknownFunctionError, ValueError) as exc:
        raise _at_line(exc, line_number)
    return replace(spec, shift=shift)


def load_catalog(path: Union[str, Path], register_all: bool = True) -> List[FunctionSpec]:
    """
    Load catalog entries from a plain-text spec file.

    Raises:
        CatalogParseError: With the offending line number
    """
    specs = []
    text = Path(path).read_text(encoding="utf-8")
    for number, line in enumerate(text.splitlines(), start=1):
        spec = parse_record(line, number)
        if spec is not None:
            specs.append(spec)
            if register_all:
                register(spec)
    logger.info(f"Loaded {len(specs)} catalog entries from {path}")
    return specs
