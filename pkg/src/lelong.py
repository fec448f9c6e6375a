"""
Lelong Numbers for pshlab
Estimators for nu_u(0, r), nu_u(0), the directional slopes d_t^+ u_t(zeta),
M_A(u) and lambda_u(0).

All four quantities are monotone in t (or A), so limits are reported at finite
depth with a bracket from the last two samples instead of being extrapolated.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.catalog import (
    FunctionSpec,
    asymptotic_slope,
    centered,
    critical_directions,
    line_profile,
    values_on_sphere,
)
from src.constants import (
    CONVERGENCE_REL_TOL,
    DEEP_T_ANALYTIC,
    DEEP_T_FINITE_DIFF,
    DEFAULT_N_PHI,
    DEFAULT_N_THETA,
    DEFAULT_T_MAX,
    DEFAULT_T_STEP,
    NON_INVARIANT_N_PSI,
    SLOPE_STEP,
)
from src.errors import DomainError, SpacingError
from src.hopf import Direction
from src.logger import setup_logger
from src.quadrature import (
    DirectionGrid,
    clamp_schedule,
    grid_for,
    integrate,
    integrate_sphere,
    prepare,
    resolvable_depth,
    sphere_nodes,
)
from src.validators import validate_distance_schedule, validate_log_radius, validate_t_schedule

logger = setup_logger(__name__)

# A direction on no coordinate axis and on none of the catalog's special lines
_GENERIC_VECTOR = np.array([0.6 + 0.28j, 0.75 - 0.1j]) / math.hypot(math.hypot(0.6, 0.28),
                                                                    math.hypot(0.75, 0.1))
_POLES = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


# ============================================================================
# Domain Types
# ============================================================================

class EstimateMethod(str, Enum):
    ANALYTIC_TAIL = "AnalyticTail"
    EXTRAPOLATED = "Extrapolated"
    GRID_LIMIT = "GridLimit"


@dataclass(frozen=True)
class LelongEstimate:
    """
    A limit value with a bracket (lower, upper) from the last two monotone samples.

    For AnalyticTail estimates the value is the exact asymptotic slope and the
    bracket spans it and the deepest numerical sample.
    """
    value: float
    bracket: Tuple[float, float]
    t_used: float
    method: EstimateMethod
    converged: bool = True

    @property
    def lower(self) -> float:
        return self.bracket[0]

    @property
    def upper(self) -> float:
        return self.bracket[1]

    def as_dict(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "t_used": self.t_used,
            "method": self.method.value,
            "converged": self.converged,
        }


# ============================================================================
# Slopes
# ============================================================================

def _slopes(f: FunctionSpec, t: float, vectors: np.ndarray) -> np.ndarray:
    """t-slope of u along each line; analytic for log-sum kinds, forward differences otherwise."""
    if f.form is not None:
        return line_profile(f, t, vectors)[1]
    base = values_on_sphere(f, t, vectors)
    ahead = values_on_sphere(f, t + SLOPE_STEP, vectors)
    return (ahead - base) / SLOPE_STEP


def _check_t(t: float):
    is_valid, message = validate_log_radius(t)
    if not is_valid:
        raise DomainError(message)


def directional_slope(f: FunctionSpec, d: Direction, t: float) -> float:
    """
    Right derivative d_t^+ u_t(zeta) of u along the complex line through d.

    Args:
        f: Catalog entry
        d: Direction of the line
        t: Log-radius, t < 0

    Returns:
        The slope; exact for log-sum kinds, (u_{t+h} - u_t)/h with h = 1e-5 otherwise

    Examples:
        >>> round(directional_slope(get_function("log-norm"), Direction(Chart.ZETA, 0.5, 0.0), -3.0), 9)
        1.0
    """
    _check_t(t)
    return float(_slopes(f, t, d.unit_vector()[None, :])[0])


def probe_vectors(f: FunctionSpec, g: Optional[DirectionGrid] = None) -> np.ndarray:
    """Grid directions plus both poles and the critical directions of f."""
    extra = [_POLES] + [np.asarray(v, dtype=complex)[None, :] for v in critical_directions(f)]
    if g is not None:
        extra.insert(0, g.vectors)
    return np.concatenate(extra)


def max_directional(f: FunctionSpec, A: float, g: DirectionGrid) -> float:
    """
    M_A(u): the largest directional slope at t = -A.

    Examples:
        For the Demailly surrogate m=2 the maximum sits on the pole z1 = 0 and equals 2
        for every A.
    """
    if not A > 0:
        raise ValueError(f"❌ Distance A must be positive (got {A:g})")
    slopes = _slopes(f, -float(A), probe_vectors(f, g))
    return float(np.max(slopes))


# ============================================================================
# Lelong Numbers
# ============================================================================

def lelong_at_radius(f: FunctionSpec, t: float, g: DirectionGrid) -> float:
    """
    nu_u(0, e^t) = (1/pi) int u_dot omega.

    Without S1-invariance the slope depends on the point of each Hopf fiber, so it is
    averaged over NON_INVARIANT_N_PSI uniform fiber phases before the omega-integral.

    Args:
        f: Catalog entry (centered when g is a log-polar grid)
        t: Log-radius, t < 0
        g: Direction grid

    Examples:
        >>> round(lelong_at_radius(radial(2.0), -1.0, make_grid(16, 16)), 10)
        2.0
    """
    _check_t(t)
    if f.s1_invariant:
        return integrate(_slopes(f, t, g.vectors), g) / math.pi
    nodes = sphere_nodes(g, NON_INVARIANT_N_PSI)
    # dsigma_3 = omega x (2 pi fiber length)
    fiber_total = integrate_sphere(_slopes(f, t, nodes.vectors), nodes)
    return fiber_total / (2.0 * math.pi) / math.pi


def exact_lelong(f: FunctionSpec) -> Optional[float]:
    """Asymptotic slope along a generic line; None for kinds without closed-form tails."""
    return asymptotic_slope(f, _GENERIC_VECTOR)


def exact_lambda(f: FunctionSpec) -> Optional[float]:
    """Largest asymptotic slope over the poles, the critical directions and a generic line."""
    slopes = [asymptotic_slope(f, v) for v in probe_vectors(f)] + [exact_lelong(f)]
    finite = [s for s in slopes if s is not None and math.isfinite(s)]
    return max(finite) if finite else None


def default_schedule(f: FunctionSpec) -> List[float]:
    """Decreasing t-schedule from -2 down to -40 (analytic jets) or -25 (finite differences)."""
    deepest = DEEP_T_ANALYTIC if f.has_analytic_jets else DEEP_T_FINITE_DIFF
    count = int(round((DEFAULT_T_MAX - deepest) / DEFAULT_T_STEP)) + 1
    return [DEFAULT_T_MAX - k * DEFAULT_T_STEP for k in range(count)]


def _limit_estimate(name: str, label: str, samples: Sequence[float], t_used: float,
                    exact: Optional[float]) -> LelongEstimate:
    last, previous = samples[-1], samples[-2]
    spread = abs(last - previous)
    converged = spread <= CONVERGENCE_REL_TOL * max(1.0, abs(last))
    if not converged:
        logger.warning(f"{name}: {label} has not converged ({previous:.6g} -> {last:.6g})")
    if exact is not None:
        return LelongEstimate(value=exact, bracket=(min(exact, last), max(exact, last)),
                              t_used=t_used, method=EstimateMethod.ANALYTIC_TAIL,
                              converged=converged)
    return LelongEstimate(value=last, bracket=(min(last, previous), max(last, previous)),
                          t_used=t_used, method=EstimateMethod.GRID_LIMIT, converged=converged)


def lelong_number(f: FunctionSpec, schedule: Optional[Sequence[float]] = None,
                  n_theta: int = DEFAULT_N_THETA, n_phi: int = DEFAULT_N_PHI) -> LelongEstimate:
    """
    nu_u(0) as the limit of nu_u(0, e^t) along a decreasing schedule.

    Args:
        f: Catalog entry
        schedule: Decreasing t-values reaching t <= -20 (default_schedule(f) if omitted)
        n_theta, n_phi: Size of the plain grid (log-polar grids keep their own theta nodes)

    Returns:
        LelongEstimate; AnalyticTail when f exposes exact asymptotic slopes

    Raises:
        SpacingError: If the schedule is not decreasing or stops above -20
    """
    schedule = list(schedule) if schedule is not None else default_schedule(f)
    is_valid, message = validate_t_schedule(schedule, decreasing=True, deepest=-20.0)
    if not is_valid:
        raise SpacingError(message)
    fc, g = prepare(f, min(schedule), n_theta, n_phi)
    schedule = clamp_schedule(fc, schedule)
    if len(schedule) < 2:
        raise SpacingError(f"❌ {f.name}: fewer than 2 resolvable t-values in the schedule")
    samples = [lelong_at_radius(fc, t, g) for t in schedule[-2:]]
    estimate = _limit_estimate(f.name, "nu(0, r)", samples, schedule[-1], exact_lelong(f))
    logger.debug(f"{f.name}: nu = {estimate.value:.6g} {estimate.bracket}")
    return estimate


def lambda_origin(f: FunctionSpec, A_schedule: Sequence[float],
                  n_theta: int = DEFAULT_N_THETA, n_phi: int = DEFAULT_N_PHI) -> LelongEstimate:
    """
    lambda_u(0) as the decreasing limit of M_A(u) over an increasing A-schedule.

    Raises:
        ValueError: If the schedule is not increasing or stops below 20
    """
    is_valid, message = validate_distance_schedule(A_schedule, reach=20.0)
    if not is_valid:
        raise ValueError(message)
    A_max = float(max(A_schedule))
    fc = centered(f)
    g = grid_for(fc, max(-A_max, resolvable_depth(fc)), n_theta, n_phi)
    values = [max_directional(fc, A, g) for A in A_schedule]
    estimate = _limit_estimate(f.name, "M_A(u)", values, -A_max, exact_lambda(f))
    logger.debug(f"{f.name}: lambda = {estimate.value:.6g} {estimate.bracket}")
    return estimate
