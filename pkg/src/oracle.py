"""
Monge-Ampere Oracles for pshlab
Mass estimators that never use the decomposition formula: the 4D density
8 det(u_{j kbar}), the Euclidean boundary flux of d^c u ^ dd^c u, the toric 1D
reduction, and the residual mass tau_u(0) with the verdicts of the bound
nu^2 <= tau <= 2 lambda nu + nu^2.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.catalog import (
    FunctionSpec,
    InvarianceVerdict,
    centered,
    check_s1_invariance,
    jet_at,
    require_smooth,
    straightened,
)
from src.config import get_default_seed
from src.constants import (
    ATOMIC_SHORTCUT_REL,
    DEFAULT_A_SCHEDULE,
    DEFAULT_N_PHI,
    DEFAULT_N_THETA,
    FLUX_N_PHI,
    FLUX_N_THETA,
    MA_DENSITY_FACTOR,
    MC_SAMPLES,
    NON_INVARIANT_N_PSI,
    ORACLE_N_PHI,
    ORACLE_N_PSI,
    ORACLE_N_THETA,
    PANEL_NODES,
    SHELL_INNER_T,
    SHELL_PANEL_WIDTH,
    VERDICT_TOL,
    VOLUME_T_FLOOR,
)
from src.errors import ConvergenceError, DomainError, InvarianceError, SpacingError, ToricFlagError
from src.fiber import record_at
from src.hopf import Point
from src.jets import Jet
from src.lelong import LelongEstimate, default_schedule, lambda_origin, lelong_number
from src.logger import setup_logger
from src.quadrature import (
    SphereNodes,
    clamp_schedule,
    grid_for,
    make_grid,
    polar_jet,
    polar_nodes,
    prepare,
    random_sphere_nodes,
    sphere_nodes,
)
from src.validators import validate_radius, validate_t_schedule

logger = setup_logger(__name__)

_CHUNK = 65536
_STOKES_REL_TOL = 1e-2


# ============================================================================
# Domain Types
# ============================================================================

class MassMethod(str, Enum):
    GRID_4D = "Grid4D"
    MONTE_CARLO = "MonteCarlo"


class TauMethod(str, Enum):
    BOUNDARY_K = "BoundaryK"
    VOLUME_ORACLE = "VolumeOracle"
    TORIC_ORACLE = "ToricOracle"


@dataclass(frozen=True)
class MassEstimate:
    """MA(u)(B_r) with an error estimate; shell is the density integral over r0 < |z| < r."""
    value: float
    error: float
    shell: float
    method: MassMethod
    seed: Optional[int] = None


@dataclass(frozen=True)
class ToricRecord:
    """Fiber functionals from the 1D theta-reduced toric formulas."""
    t: float
    I: float
    J: float
    cross: float
    K: float


@dataclass(frozen=True)
class TauEstimate:
    value: float
    bracket: tuple
    method: TauMethod
    t_used: float
    cross_check: Optional[float] = None  # VolumeOracle tau at the shallowest t, when run


@dataclass(frozen=True)
class MassReport:
    """
    nu, lambda and tau of one member with both verdicts of nu^2 <= tau <= 2 lambda nu + nu^2.

    The upper bound is only asserted for S1-invariant members; for the others
    verdict_upper still records the comparison but upper_applicable is False.
    """
    name: str
    parameter: Optional[float]
    nu: LelongEstimate
    lam: LelongEstimate
    tau: TauEstimate
    lower_bound: float
    upper_bound: float
    verdict_lower: bool
    verdict_upper: bool
    s1_invariant: InvarianceVerdict
    tol: float
    seed: int

    @property
    def upper_applicable(self) -> bool:
        return self.s1_invariant.invariant

    @property
    def upper_note(self) -> str:
        if self.upper_applicable:
            return "asserted"
        state = "violated" if not self.verdict_upper else "satisfied"
        return f"not applicable: not S1-invariant (bound {state})"

    @property
    def passed(self) -> bool:
        """Lower bound holds and, where applicable, the upper bound too."""
        return self.verdict_lower and (self.verdict_upper or not self.upper_applicable)

    def as_row(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "parameter": self.parameter,
            "nu": self.nu.value,
            "nu_lower": self.nu.lower,
            "nu_upper": self.nu.upper,
            "lambda": self.lam.value,
            "lambda_lower": self.lam.lower,
            "lambda_upper": self.lam.upper,
            "tau": self.tau.value,
            "tau_lower": self.tau.bracket[0],
            "tau_upper": self.tau.bracket[1],
            "tau_method": self.tau.method.value,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "verdict_lower": self.verdict_lower,
            "verdict_upper": self.verdict_upper,
            "s1_invariant": self.s1_invariant.label,
        }

    def as_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "parameter": self.parameter,
            "nu": self.nu.as_dict(),
            "lambda": self.lam.as_dict(),
            "tau": {
                "value": self.tau.value,
                "lower": self.tau.bracket[0],
                "upper": self.tau.bracket[1],
                "method": self.tau.method.value,
                "t_used": self.tau.t_used,
                "cross_check": self.tau.cross_check,
            },
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "verdict_lower": self.verdict_lower,
            "verdict_upper": self.verdict_upper,
            "upper_bound_status": self.upper_note,
            "s1_invariant": self.s1_invariant.label,
            "invariance_violation": self.s1_invariant.max_violation,
            "tol": self.tol,
            "seed": self.seed,
        }


# ============================================================================
# Densities
# ============================================================================

def ma_density(f: FunctionSpec, p: Point) -> float:
    """
    Density of (dd^c u)^2 against Lebesgue measure on C^2: 8 det(u_{j kbar}(p)).

    Raises:
        SmoothnessError: For MaxOfLogs
        DomainError: At the origin or outside B1

    Examples:
        For |z|^2 the density is 8 everywhere; for log|z| it is 0 off the origin.
    """
    require_smooth(f, "ma_density")
    r = p.r
    is_valid, message = validate_radius(r)
    if not is_valid:
        raise DomainError(message)
    t = math.log(r)
    jet = jet_at(f, (p.as_array() / r)[None, :], t)
    return float(MA_DENSITY_FACTOR * jet.det_mixed[0] * math.exp(-4.0 * t))


def _flux_density(jet: Jet, w: np.ndarray) -> np.ndarray:
    """(d^c u ^ dd^c u)(e1, e2, e3) on the oriented frame e1 = i w, e2 = (-w2-bar, w1-bar), e3 = i e2."""
    e1 = 1j * w
    e2 = np.stack([-np.conj(w[:, 1]), np.conj(w[:, 0])], axis=-1)
    e3 = 1j * e2

    def beta(v):
        return np.imag(np.sum(jet.grad * v, axis=-1))

    def gamma(a, b):
        return -2.0 * np.imag(np.einsum("nj,njk,nk->n", a, jet.hess_mixed, np.conj(b)))

    return beta(e1) * gamma(e2, e3) - beta(e2) * gamma(e1, e3) + beta(e3) * gamma(e1, e2)


def _integrate_nodes(f: FunctionSpec, nodes: SphereNodes, t: float, density) -> float:
    total = 0.0
    for start in range(0, nodes.size, _CHUNK):
        w = nodes.vectors[start:start + _CHUNK]
        values = density(jet_at(f, w, t), w)
        total += float(np.sum(values * nodes.weights[start:start + _CHUNK]))
    return total


def _prepared(f: FunctionSpec) -> FunctionSpec:
    return centered(straightened(f))


def _flux(fc: FunctionSpec, t: float, n_theta: int, n_phi: int) -> float:
    g = grid_for(fc, t, n_theta, n_phi)
    n_psi = 1 if fc.s1_invariant else NON_INVARIANT_N_PSI
    return _integrate_nodes(fc, sphere_nodes(g, n_psi), t, _flux_density)


def sphere_flux(f: FunctionSpec, r: float, n_theta: int = FLUX_N_THETA,
                n_phi: int = FLUX_N_PHI) -> float:
    """
    int_{S_r} d^c u ^ dd^c u from Euclidean derivatives on S^3 nodes.

    Valid with or without S1-invariance; equals MA(u)(B_r) by Stokes.

    Examples:
        log|z| gives pi^2 at every radius, |z|^2 gives 4 pi^2 r^4.
    """
    require_smooth(f, "sphere_flux")
    is_valid, message = validate_radius(r)
    if not is_valid:
        raise DomainError(message)
    return _flux(_prepared(f), math.log(r), n_theta, n_phi)


# ============================================================================
# Shell Integrals and MA(u)(B_r)
# ============================================================================

def _shell_nodes() -> SphereNodes:
    return sphere_nodes(make_grid(ORACLE_N_THETA, ORACLE_N_PHI), ORACLE_N_PSI)


def _det_density(jet: Jet, w: np.ndarray) -> np.ndarray:
    return MA_DENSITY_FACTOR * jet.det_mixed


def _shell_panels(fc: FunctionSpec, t0: float, t1: float) -> List[float]:
    """MA mass of unit-width t-panels between e^{t0} and e^{t1}, innermost first."""
    n_panels = max(1, int(math.ceil((t1 - t0) / SHELL_PANEL_WIDTH - 1e-9)))
    edges = np.linspace(t0, t1, n_panels + 1)
    x, wx = leggauss(PANEL_NODES)
    nodes = _shell_nodes()
    panels = []
    for a, b in zip(edges[:-1], edges[1:]):
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        # dlambda = e^{4t} dt dsigma_3 and the scaled det already carries e^{4t}
        panels.append(sum(half * w * _integrate_nodes(fc, nodes, mid + half * s, _det_density)
                          for s, w in zip(x, wx)))
    return panels


def _shell_monte_carlo(fc: FunctionSpec, t0: float, t1: float, n_samples: int, seed: int):
    rng = np.random.default_rng(seed)
    ts = rng.uniform(t0, t1, size=n_samples)
    nodes = random_sphere_nodes(n_samples, rng)
    values = np.empty(n_samples)
    for start in range(0, n_samples, _CHUNK):
        stop = min(start + _CHUNK, n_samples)
        # unscaled jets; e^{4t} turns det into a density against dt dsigma_3
        z = np.exp(ts[start:stop])[:, None] * nodes.vectors[start:stop]
        jet = jet_at(fc, z, 0.0)
        values[start:stop] = MA_DENSITY_FACTOR * jet.det_mixed * np.exp(4.0 * ts[start:stop])
    volume = (t1 - t0) * 2.0 * math.pi ** 2
    return float(np.mean(values) * volume), float(np.std(values) * volume / math.sqrt(n_samples))


def _check_growth(name: str, panels: Sequence[float], reference: float):
    if len(panels) < 3:
        return
    a, b, c = panels[0], panels[1], panels[2]
    if a > b > c and a > ATOMIC_SHORTCUT_REL * abs(reference):
        raise ConvergenceError(
            f"❌ {name}: shell mass keeps growing towards the origin "
            f"({c:.3e}, {b:.3e}, {a:.3e} on the three innermost panels)"
        )


def ma_mass_ball(f: FunctionSpec, r: float, method: MassMethod = MassMethod.GRID_4D,
                 seed: Optional[int] = None, n_samples: int = MC_SAMPLES) -> MassEstimate:
    """
    MA(u)(B_r) from the density over the shell e^{-10} < |z| < r plus the inner boundary flux.

    When the shell integral is below 1e-6 of the flux through S_r, all mass sits at
    the origin and the flux through S_r is returned directly.

    Args:
        f: Smooth catalog entry
        r: Radius in (0, 1)
        method: Grid4D (Gauss-Legendre panels in t times S^3 nodes) or MonteCarlo
        seed: Monte Carlo seed (recorded in the estimate)
        n_samples: Monte Carlo sample count

    Returns:
        MassEstimate; error is the Stokes discrepancy against the flux through S_r
        (plus the Monte Carlo standard error)

    Raises:
        ConvergenceError: If the shell mass grows towards the origin
    """
    require_smooth(f, "ma_mass_ball")
    is_valid, message = validate_radius(r)
    if not is_valid:
        raise DomainError(message)
    fc = _prepared(f)
    t1 = math.log(r)
    t0 = min(SHELL_INNER_T, t1 - SHELL_PANEL_WIDTH)

    outer = _flux(fc, t1, FLUX_N_THETA, FLUX_N_PHI)
    stat_error = 0.0
    used_seed = None
    if method is MassMethod.MONTE_CARLO:
        used_seed = get_default_seed() if seed is None else seed
        shell, stat_error = _shell_monte_carlo(fc, t0, t1, n_samples, used_seed)
    else:
        panels = _shell_panels(fc, t0, t1)
        shell = float(sum(panels))
        _check_growth(f.name, panels, outer)

    if abs(shell) < ATOMIC_SHORTCUT_REL * abs(outer):
        logger.debug(f"{f.name}: shell mass {shell:.3e} negligible, using the flux through S_r")
        return MassEstimate(value=outer, error=abs(shell) + stat_error, shell=shell,
                            method=method, seed=used_seed)

    inner = _flux(fc, t0, FLUX_N_THETA, FLUX_N_PHI)
    value = inner + shell
    return MassEstimate(value=value, error=abs(value - outer) + stat_error, shell=shell,
                        method=method, seed=used_seed)


def geodesic_defect(f: FunctionSpec, t0: float, t1: float) -> float:
    """MA mass of the shell e^{t0} < |z| < e^{t1}; zero exactly when u is a geodesic ray there."""
    require_smooth(f, "geodesic_defect")
    if not t0 < t1 < 0:
        raise DomainError(f"❌ Need t0 < t1 < 0 (got {t0:g}, {t1:g})")
    return float(sum(_shell_panels(_prepared(f), t0, t1)))


# ============================================================================
# Toric Reduction
# ============================================================================

def _require_toric(f: FunctionSpec):
    if not f.toric:
        raise ToricFlagError(f"❌ {f.name} is not flagged toric")


def toric_functionals(f: FunctionSpec, t: float, n_theta: int = DEFAULT_N_THETA) -> ToricRecord:
    """
    I, J, cross and K at t from 1D theta-integrals.

    I = (pi/2) int u_dot sin(theta), J = (pi/2) int u_dot^2 sin(theta),
    cross = 2 pi int u_dot d_theta(sin(theta) u_theta).
    """
    _require_toric(f)
    require_smooth(f, "toric_functionals")
    nodes = polar_nodes(f, t, n_theta)
    jet = polar_jet(f, t, nodes)
    d_theta = nodes.sin_theta * jet.lap  # d_theta(sin u_theta) for phi-independent u
    I = 0.5 * math.pi * float(np.sum(nodes.weights * jet.u_dot * nodes.sin_theta))
    J = 0.5 * math.pi * float(np.sum(nodes.weights * jet.u_dot ** 2 * nodes.sin_theta))
    cross = 2.0 * math.pi * float(np.sum(nodes.weights * jet.u_dot * d_theta))
    return ToricRecord(t=t, I=I, J=J, cross=cross, K=cross + J)


def toric_mass(f: FunctionSpec, r: float, n_theta: int = DEFAULT_N_THETA) -> float:
    """
    MA(u)(B_r) for toric u from the 1D reduced density.

    The shell e^{-10} < |z| < r contributes
    pi^2 int dt int dtheta [2 u_ddot D - 2 sin(theta) u_dot_theta^2 + u_ddot u_dot sin(theta)],
    D = d_theta(sin(theta) u_theta); the inner ball contributes pi K(u_{t0}).

    Raises:
        ToricFlagError: If f is not flagged toric
    """
    _require_toric(f)
    require_smooth(f, "toric_mass")
    is_valid, message = validate_radius(r)
    if not is_valid:
        raise DomainError(message)
    t1 = math.log(r)
    t0 = min(SHELL_INNER_T, t1 - SHELL_PANEL_WIDTH)
    nodes = polar_nodes(f, t0, n_theta)

    n_panels = max(1, int(math.ceil((t1 - t0) / SHELL_PANEL_WIDTH - 1e-9)))
    edges = np.linspace(t0, t1, n_panels + 1)
    x, wx = leggauss(PANEL_NODES)
    shell = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        for s, w in zip(x, wx):
            jet = polar_jet(f, mid + half * s, nodes)
            d_theta = nodes.sin_theta * jet.lap
            density = (2.0 * jet.u_ddot * d_theta
                       - 2.0 * nodes.sin_theta * jet.udot_theta ** 2
                       + jet.u_ddot * jet.u_dot * nodes.sin_theta)
            shell += half * w * float(np.sum(nodes.weights * density))
    boundary = math.pi * toric_functionals(f, t0, n_theta).K
    return math.pi ** 2 * shell + boundary


# ============================================================================
# Residual Mass and Bound Verdicts
# ============================================================================

def _bracket(values: Sequence[float]) -> tuple:
    return (min(values[-2:]), max(values[-2:]))


def residual_mass(f: FunctionSpec, schedule: Optional[Sequence[float]] = None,
                  method: Optional[TauMethod] = None, cross_check: bool = True,
                  seed: Optional[int] = None, n_theta: int = DEFAULT_N_THETA,
                  n_phi: int = DEFAULT_N_PHI) -> TauEstimate:
    """
    tau_u(0) = lim MA(u)(B_r) / pi^2.

    Args:
        f: Smooth catalog entry
        schedule: Decreasing t-values (default_schedule(f) if omitted)
        method: BoundaryK (S1-invariant members), VolumeOracle or ToricOracle;
            chosen from the invariance check when omitted
        cross_check: Compare BoundaryK with VolumeOracle at the shallowest t
        seed: Seed of the invariance sampler
        n_theta, n_phi: Size of the plain grid of BoundaryK (theta nodes of ToricOracle)

    Returns:
        TauEstimate; the bracket comes from the last two samples, MA(u)(B_r) being
        nondecreasing in r

    Raises:
        InvarianceError: If BoundaryK is requested for a function without S1-invariance
    """
    require_smooth(f, "residual_mass")
    schedule = list(schedule) if schedule is not None else default_schedule(f)
    is_valid, message = validate_t_schedule(schedule, decreasing=True)
    if not is_valid:
        raise SpacingError(message)
    invariant = check_s1_invariance(f, seed=seed).invariant
    if method is None:
        method = TauMethod.BOUNDARY_K if invariant else TauMethod.VOLUME_ORACLE
    if method is TauMethod.BOUNDARY_K and not invariant:
        raise InvarianceError(f"❌ BoundaryK needs an S1-invariant function; {f.name} is not")

    check = None
    if method is TauMethod.BOUNDARY_K:
        fc, g = prepare(f, min(schedule), n_theta, n_phi)
        kept = clamp_schedule(fc, schedule)
        ts = kept[-2:]
        values = [record_at(fc, t, g).K / math.pi for t in ts]
        if cross_check:
            shallow = kept[0]
            boundary = record_at(fc, shallow, g).K / math.pi
            check = ma_mass_ball(f, math.exp(shallow)).value / math.pi ** 2
            if abs(check - boundary) > _STOKES_REL_TOL * max(abs(boundary), 1e-12):
                logger.warning(f"{f.name}: BoundaryK {boundary:.6g} and VolumeOracle {check:.6g} "
                               f"disagree at t={shallow:g}")
    elif method is TauMethod.TORIC_ORACLE:
        ts = clamp_schedule(f, schedule)[-2:]
        values = [toric_mass(f, math.exp(t), n_theta) / math.pi ** 2 for t in ts]
    else:
        ts = [t for t in schedule if t >= VOLUME_T_FLOOR][-2:]
        if len(ts) < 2:
            raise SpacingError(f"❌ VolumeOracle needs two t-values >= {VOLUME_T_FLOOR:g}")
        values = [ma_mass_ball(f, math.exp(t)).value / math.pi ** 2 for t in ts]

    estimate = TauEstimate(value=values[-1], bracket=_bracket(values), method=method,
                           t_used=ts[-1], cross_check=check)
    logger.debug(f"{f.name}: tau = {estimate.value:.6g} via {method.value}")
    return estimate


def verify_bounds(f: FunctionSpec, schedule: Optional[Sequence[float]] = None,
                  A_schedule: Sequence[float] = DEFAULT_A_SCHEDULE, tol: float = VERDICT_TOL,
                  seed: Optional[int] = None, cross_check: bool = True,
                  n_theta: int = DEFAULT_N_THETA, n_phi: int = DEFAULT_N_PHI) -> MassReport:
    """
    Assemble nu, lambda, tau and the verdicts of nu^2 <= tau <= 2 lambda nu + nu^2.

    Non-invariant members get tau from the VolumeOracle and an upper-bound verdict
    that is recorded but marked not applicable. With cross_check, S1-invariant
    members also carry the VolumeOracle tau at the shallowest t in tau.cross_check.

    Examples:
        Demailly m=2: tau = 1 <= 2 * 2 * 0.5 + 0.25 = 2.25, both verdicts true.
    """
    seed = get_default_seed() if seed is None else seed
    nu = lelong_number(f, schedule, n_theta, n_phi)
    lam = lambda_origin(f, A_schedule, n_theta, n_phi)
    invariance = check_s1_invariance(f, seed=seed)
    tau = residual_mass(f, schedule, cross_check=cross_check, seed=seed,
                        n_theta=n_theta, n_phi=n_phi)

    lower = nu.value ** 2
    upper = 2.0 * lam.value * nu.value + nu.value ** 2
    report = MassReport(
        name=f.name,
        parameter=f.parameter,
        nu=nu,
        lam=lam,
        tau=tau,
        lower_bound=lower,
        upper_bound=upper,
        verdict_lower=tau.value >= lower - tol,
        verdict_upper=tau.value <= upper + tol,
        s1_invariant=invariance,
        tol=tol,
        seed=seed,
    )
    upper_text = (("PASS" if report.verdict_upper else "FAIL") if report.upper_applicable
                  else report.upper_note)
    logger.info(f"{f.name}: nu={nu.value:.6g} lambda={lam.value:.6g} tau={tau.value:.6g} "
                f"lower={'PASS' if report.verdict_lower else 'FAIL'} upper={upper_text}")
    return report
