"""
Ray Traces for pshlab
The fiber functionals along t, seen as a subgeodesic ray u_t, and the checks run on them:
the decomposition identity -dE/dt + J = K, convexity of the J - E primitive, the mass
bound along the ray, liminf I' = 0, the vanishing-Lelong surrogate and the geodesic test.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.catalog import FunctionSpec
from src.config import get_thread_count
from src.constants import DEFAULT_N_PHI, DEFAULT_N_THETA, MONOTONE_TOL
from src.errors import SpacingError
from src.fiber import FunctionalRecord, fiber_field, quasi_psh_defect, record_at
from src.lelong import max_directional
from src.logger import setup_logger
from src.oracle import geodesic_defect
from src.quadrature import DirectionGrid, clamp_schedule, make_grid, prepare
from src.validators import validate_t_schedule

logger = setup_logger(__name__)

_UNIFORM_REL_TOL = 1e-9


# ============================================================================
# Traces
# ============================================================================

@dataclass
class RayTrace:
    """FunctionalRecords in increasing t for one member, with the grid they were computed on."""
    f_name: str
    grid: Dict[str, object]
    records: List[FunctionalRecord] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(record, name) for record in self.records], dtype=float)

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    @property
    def I_prime(self) -> np.ndarray:
        """dI/dt by central differences (one-sided at the ends)."""
        return np.gradient(self.column("I"), self.t)

    @property
    def dE_fd(self) -> np.ndarray:
        """dE/dt by finite differences of the E column."""
        return np.gradient(self.column("E"), self.t)

    def primitive(self) -> np.ndarray:
        """
        Trapezoid primitive of J - dE/dt (= K by the direct quadrature), anchored at 0
        at the shallowest record.
        """
        integrand = self.column("J") - self.column("dE_direct")
        steps = np.diff(self.t) * 0.5 * (integrand[1:] + integrand[:-1])
        running = np.concatenate([[0.0], np.cumsum(steps)])
        return running - running[-1]

    def tail(self) -> slice:
        """The deepest quarter of the records (at least two)."""
        return slice(0, max(2, len(self.records) // 4))


def _threads(count: Optional[int]) -> int:
    return count if count is not None else get_thread_count()


def trace(f: FunctionSpec, t_grid: Sequence[float], g: Optional[DirectionGrid] = None,
          n_theta: int = DEFAULT_N_THETA, n_phi: int = DEFAULT_N_PHI,
          threads: Optional[int] = None) -> RayTrace:
    """
    One FunctionalRecord per t.

    Args:
        f: Smooth catalog entry
        t_grid: Strictly increasing negative t-values
        g: Grid to use as is (f must match it); built by prepare(f, min(t_grid)) if omitted
        n_theta, n_phi: Sizes of the plain grid when g is built here
        threads: Worker threads (PSHLAB_THREADS if omitted)

    Returns:
        RayTrace ordered by increasing t, independent of the thread count

    Raises:
        SpacingError: If t_grid is not increasing and negative
    """
    t_grid = [float(t) for t in t_grid]
    is_valid, message = validate_t_schedule(t_grid, decreasing=False)
    if not is_valid:
        raise SpacingError(message)
    if g is None:
        fc, g = prepare(f, t_grid[0], n_theta, n_phi)
        t_grid = clamp_schedule(fc, t_grid)
    else:
        fc = f

    workers = max(1, min(_threads(threads), len(t_grid)))
    if workers == 1:
        records = [record_at(fc, t, g) for t in t_grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda t: record_at(fc, t, g), t_grid))

    tr = RayTrace(f_name=f.name, grid=g.describe(), records=records)
    if f.s1_invariant:
        for name in ("I", "J"):
            values = tr.column(name)
            drop = np.diff(values)
            if drop.size and np.min(drop) < -MONOTONE_TOL * max(1.0, float(np.max(np.abs(values)))):
                logger.warning(f"{f.name}: {name} decreases along the trace (min step {np.min(drop):.3e})")
    logger.info(f"{f.name}: trace of {len(records)} records on t in [{t_grid[0]:g}, {t_grid[-1]:g}]")
    return tr


def _require_uniform(tr: RayTrace, minimum: int):
    if len(tr.records) < minimum:
        raise SpacingError(f"❌ Need at least {minimum} records (got {len(tr.records)})")
    steps = np.diff(tr.t)
    if np.max(steps) - np.min(steps) > _UNIFORM_REL_TOL * max(1.0, float(np.max(np.abs(steps)))):
        raise SpacingError("❌ Records must be uniformly spaced in t")


# ============================================================================
# Identity and Convexity
# ============================================================================

def check_decomposition_identity(tr: RayTrace) -> float:
    """
    Max relative mismatch of dE/dt (finite differences of E) against J - K at interior records.

    Examples:
        For log|z| every term is constant and the mismatch is 0.
    """
    if len(tr.records) < 3:
        raise SpacingError(f"❌ Need at least 3 records (got {len(tr.records)})")
    J, K = tr.column("J"), tr.column("K")
    residual = np.abs(tr.dE_fd - (J - K))[1:-1]
    scale = np.maximum(np.maximum(np.abs(J), np.abs(K)), np.finfo(float).tiny)[1:-1]
    return float(np.max(residual / scale))


@dataclass(frozen=True)
class ConvexityVerdict:
    passed: bool
    min_first_difference: float
    min_second_difference: float
    affine: bool


def _convexity(values: np.ndarray, tol: float) -> ConvexityVerdict:
    first = np.diff(values)
    second = np.diff(values, 2)
    scale = tol * max(1.0, float(np.max(np.abs(values))))
    return ConvexityVerdict(
        passed=bool(np.min(first) >= -scale and np.min(second) >= -scale),
        min_first_difference=float(np.min(first)),
        min_second_difference=float(np.min(second)),
        affine=bool(np.max(np.abs(second)) <= scale),
    )


def check_convexity(tr: RayTrace, tol: float = 1e-8) -> ConvexityVerdict:
    """
    J - E (through its primitive) is nondecreasing and convex in t.

    Raises:
        SpacingError: With fewer than 4 records or a non-uniform step
    """
    _require_uniform(tr, 4)
    verdict = _convexity(tr.primitive(), tol)
    logger.debug(f"{tr.f_name}: convexity {'PASS' if verdict.passed else 'FAIL'} "
                 f"(min second difference {verdict.min_second_difference:.3e})")
    return verdict


def check_script_I_convexity(tr: RayTrace, tol: float = 1e-8) -> ConvexityVerdict:
    """The mean int u_t omega is nondecreasing and convex in t for S1-invariant u."""
    _require_uniform(tr, 4)
    return _convexity(tr.column("script_I"), tol)


def liminf_Iprime(tr: RayTrace) -> float:
    """
    min of I'(t) over the deepest quarter of the trace; tends to 0 as the trace deepens.

    Raises:
        SpacingError: If the trace stops above t = -20
    """
    if len(tr.records) < 3 or tr.t[0] > -20.0:
        raise SpacingError("❌ liminf I' needs at least 3 records reaching t <= -20")
    return float(np.min(tr.I_prime[tr.tail()]))


# ============================================================================
# Mass Bounds
# ============================================================================

@dataclass(frozen=True)
class MassBoundVerdict:
    passed: bool
    M_A: float
    worst_margin: float  # min of M_A (I' + 2 I) + J - K over the checked records
    checked: int


def mass_bound_along_ray(tr: RayTrace, f: FunctionSpec, A: float, tol: float = 1e-8,
                         M_A: Optional[float] = None) -> MassBoundVerdict:
    """
    K(t) <= M_A(u) (I'(t) + 2 I(t)) + J(t) at every interior record with t <= -A.

    Raises:
        ValueError: If A <= 0 or no interior record lies at t <= -A
    """
    if not A > 0:
        raise ValueError(f"❌ Distance A must be positive (got {A:g})")
    if M_A is None:
        M_A = max_directional(f, A, make_grid(16, 16))
    t = tr.t
    rhs = M_A * (tr.I_prime + 2.0 * tr.column("I")) + tr.column("J")
    margin = rhs - tr.column("K")
    mask = t <= -A
    mask[0] = mask[-1] = False
    if not np.any(mask):
        raise ValueError(f"❌ The trace has no interior record at t <= {-A:g}")
    worst = float(np.min(margin[mask]))
    scale = tol * max(1.0, float(np.max(np.abs(rhs[mask]))))
    return MassBoundVerdict(passed=worst >= -scale, M_A=M_A, worst_margin=worst,
                            checked=int(np.sum(mask)))


@dataclass(frozen=True)
class VanishingVerdict:
    premise: bool
    passed: bool
    K_tail: float
    bound: float


def check_en002_surrogate(tr: RayTrace, f: FunctionSpec, delta: float) -> VanishingVerdict:
    """
    Quantified form of "nu = 0 implies tau = 0": if I' and I stay below delta on the
    deepest quarter, K must stay below 3 (2 M_2(u) + 1) delta there.

    A false premise makes the check vacuously true.
    """
    tail = tr.tail()
    premise = bool(np.max(np.abs(tr.I_prime[tail])) < delta and np.max(tr.column("I")[tail]) < delta)
    K_tail = float(np.max(tr.column("K")[tail]))
    bound = 3.0 * (2.0 * max_directional(f, 2.0, make_grid(16, 16)) + 1.0) * delta
    return VanishingVerdict(premise=premise, passed=(not premise) or K_tail < bound,
                            K_tail=K_tail, bound=bound)


@dataclass(frozen=True)
class GeodesicVerdict:
    K_constant: bool
    shell_mass: float
    geodesic: bool
    consistent: bool


def geodesic_test(tr: RayTrace, f: FunctionSpec, tol: float = 1e-6) -> GeodesicVerdict:
    """
    K constant along the trace should coincide with (dd^c u)^2 = 0 on the traced shell.

    Args:
        tr: Trace of f
        f: The traced member
        tol: Relative tolerance of K-constancy and absolute tolerance of the shell mass / pi^2
    """
    K = tr.column("K")
    spread = float(np.max(K) - np.min(K))
    K_constant = spread <= tol * max(1.0, float(np.max(np.abs(K))))
    shell = geodesic_defect(f, float(tr.t[0]), float(tr.t[-1])) / math.pi ** 2
    geodesic = abs(shell) < tol
    if K_constant != geodesic:
        logger.warning(f"{tr.f_name}: K spread {spread:.3e} but shell mass/pi^2 {shell:.3e}")
    return GeodesicVerdict(K_constant=K_constant, shell_mass=shell, geodesic=geodesic,
                           consistent=K_constant == geodesic)


# ============================================================================
# Quasi-psh
# ============================================================================

@dataclass(frozen=True)
class QuasiPshVerdict:
    passed: bool
    min_defect: float
    t_worst: float


def check_quasi_psh(f: FunctionSpec, t_grid: Sequence[float], g: DirectionGrid,
                    tol: float = 1e-8) -> QuasiPshVerdict:
    """(u_ddot + 2 u_dot)/2 + Delta_omega u_t >= 0 at every node and t (up to tol)."""
    defects = [quasi_psh_defect(fiber_field(f, float(t), g)) for t in t_grid]
    worst = int(np.argmin(defects))
    return QuasiPshVerdict(passed=defects[worst] >= -tol, min_defect=float(defects[worst]),
                           t_worst=float(t_grid[worst]))
