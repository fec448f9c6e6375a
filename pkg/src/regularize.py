"""
Regularization for pshlab
Mollification u_eps = u * rho_eps by 4D product quadrature, the Friedrichs-type
commutator bound and the regularized maximal-slope bound M_B(u_eps) <= 2 M_A(u) + C eps.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from src.catalog import FunctionSpec, jet_at, values_at, wrap_custom
from src.config import get_default_seed
from src.constants import (
    FRIEDRICHS_DELTA,
    FRIEDRICHS_STEP,
    MC_SAMPLES,
    MIN_ACCEPTED_EPSILON,
    MOLLIFIER_HOPF_NODES,
    MOLLIFIER_RADIAL_NODES,
    SLOPE_STEP,
)
from src.errors import SupportError
from src.hopf import Point
from src.lelong import max_directional, probe_vectors
from src.logger import setup_logger
from src.quadrature import DirectionGrid, random_sphere_nodes
from src.validators import validate_mollifier_support, validate_slope_window

logger = setup_logger(__name__)


# ============================================================================
# Kernel and Nodes
# ============================================================================

def _bump(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = s < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def kernel_constant() -> float:
    """c with c int_{C^2} exp(-1/(1-|w|^2)) dlambda(w) = 1 (the radial integral times |S^3| = 2 pi^2)."""
    radial, _ = quad(lambda s: float(_bump(np.array([s]))[0]) * s ** 3, 0.0, 1.0)
    return 1.0 / (2.0 * math.pi ** 2 * radial)


@dataclass(frozen=True, eq=False)
class Mollifier:
    """
    rho_eps on 4D product nodes.

    offsets are points w of the unit ball and weights already include rho(w),
    so u_eps(z) = sum_k weights_k u(z - eps offsets_k).
    """
    epsilon: float
    offsets: np.ndarray
    weights: np.ndarray
    constant: float

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def second_moment(self) -> float:
        """s2 = int |w|^2 rho dlambda, so (|z|^2)_eps = |z|^2 + eps^2 s2."""
        return float(np.sum(self.weights * np.sum(np.abs(self.offsets) ** 2, axis=-1)))


def _hopf_sphere(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """n x n x n nodes on S^3: Gauss-Legendre in cos(theta), uniform phi and eta, dsigma_3 weights."""
    x, wx = leggauss(n)
    phi = 2.0 * math.pi * np.arange(n) / n
    eta = 4.0 * math.pi * np.arange(n) / n
    X, P, E = np.meshgrid(x, phi, eta, indexing="ij")
    W = np.broadcast_to(wx[:, None, None], X.shape) * (2.0 * math.pi / n) * (4.0 * math.pi / n) / 8.0
    half = 0.5 * np.arccos(X)
    z1 = np.sin(half) * np.exp(0.5j * (E + P))
    z2 = np.cos(half) * np.exp(0.5j * (E - P))
    return np.stack([z1.ravel(), z2.ravel()], axis=-1), W.ravel()


def make_mollifier(epsilon: float, n_radial: int = MOLLIFIER_RADIAL_NODES,
                   n_hopf: int = MOLLIFIER_HOPF_NODES) -> Mollifier:
    """
    Build rho_eps with rho(s) = c exp(-1/(1 - s^2)) on s < 1.

    Args:
        epsilon: Kernel radius, > 0
        n_radial: Gauss-Legendre nodes in s on [0, 1] (weight s^3)
        n_hopf: Nodes per Hopf angle on S^3

    Returns:
        Mollifier whose discrete mass is 1 within 1e-8
    """
    if not epsilon > 0:
        raise SupportError(f"❌ Epsilon must be positive (got {epsilon:g})")
    constant = kernel_constant()
    x, wx = leggauss(n_radial)
    s = 0.5 * (x + 1.0)
    radial_w = 0.5 * wx * s ** 3 * constant * _bump(s)
    sphere, sphere_w = _hopf_sphere(n_hopf)
    offsets = (s[:, None, None] * sphere[None, :, :]).reshape(-1, 2)
    weights = (radial_w[:, None] * sphere_w[None, :]).ravel()
    mass = float(np.sum(weights))
    logger.debug(f"Mollifier eps={epsilon:g}: {weights.size} nodes, discrete mass {mass:.12f}")
    # Gauss-Legendre leaves a small defect on the flat bump; rescale to unit mass
    return Mollifier(epsilon=float(epsilon), offsets=offsets, weights=weights / mass,
                     constant=constant)


# ============================================================================
# Mollified Values
# ============================================================================

def _mollify(f: FunctionSpec, m: Mollifier, z: np.ndarray) -> np.ndarray:
    """u_eps at points z of shape (N, 2) without support checks."""
    z = np.asarray(z, dtype=complex).reshape(-1, 2)
    shifted = z[:, None, :] - m.epsilon * m.offsets[None, :, :]
    values = values_at(f, shifted.reshape(-1, 2)).reshape(z.shape[0], -1)
    return values @ m.weights


def _check_support(m: Mollifier, r: float):
    is_valid, message = validate_mollifier_support(m.epsilon, r)
    if not is_valid:
        raise SupportError(message)


def mollified_eval(f: FunctionSpec, m: Mollifier, p: Point) -> float:
    """
    u_eps(p) = int_{|w| <= 1} u(p - eps w) rho(w) dlambda(w).

    Raises:
        SupportError: If eps >= min(|p|, 1 - |p|)

    Examples:
        For |z|^2 this is |p|^2 + eps^2 m.second_moment.
    """
    _check_support(m, p.r)
    return float(_mollify(f, m, p.as_array()[None, :])[0])


def mollified_spec(f: FunctionSpec, m: Mollifier) -> FunctionSpec:
    """u_eps as a Custom catalog entry, so catalog checks run on the regularization."""

    def u(z1, z2):
        return _mollify(f, m, np.stack([np.asarray(z1), np.asarray(z2)], axis=-1))

    return wrap_custom(f"{f.name}-eps{m.epsilon:g}", u, s1_invariant=f.s1_invariant,
                       toric=f.toric)


# ============================================================================
# Friedrichs Gap
# ============================================================================

def _radial_derivative(f: FunctionSpec, z: np.ndarray) -> np.ndarray:
    """d_r u = 2 Re(sum_j u_j z_j) / |z|."""
    r = np.linalg.norm(z, axis=-1)
    jet = jet_at(f, z, 0.0)
    return 2.0 * np.real(np.sum(jet.grad * z, axis=-1)) / r


def friedrichs_gap(f: FunctionSpec, m: Mollifier, p: Point) -> float:
    """
    |r d_r (u * rho_eps)(p) - r (d_r u * rho_eps)(p)|.

    The first term is a central difference of u_eps in log-radius, the second
    mollifies the exact radial derivative.

    Raises:
        SupportError: If the eps-ball around p (or its radial neighbours) leaves the domain
    """
    r = p.r
    h = FRIEDRICHS_STEP
    _check_support(m, r * math.exp(h))
    _check_support(m, r * math.exp(-h))
    z = p.as_array()
    outer, inner = _mollify(f, m, np.stack([z * math.exp(h), z * math.exp(-h)]))
    left = (outer - inner) / (2.0 * h)

    shifted = z[None, :] - m.epsilon * m.offsets
    right = r * float(_radial_derivative(f, shifted) @ m.weights)
    return abs(left - right)


def gradient_l1_norm(f: FunctionSpec, radius: float = 1.0 - FRIEDRICHS_DELTA,
                     n_samples: int = MC_SAMPLES, seed: Optional[int] = None) -> Tuple[float, float]:
    """
    Monte Carlo estimate of ||grad u||_{L^1(B_radius)} with its standard error.

    |grad u| is the Euclidean gradient norm 2 |du/dz| on R^4.

    Examples:
        For log|z|, ||grad u||_{L^1(B_R)} = 2 pi^2 R^3 / 3.
    """
    rng = np.random.default_rng(get_default_seed() if seed is None else seed)
    x = rng.standard_normal((n_samples, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    # uniform in the 4-ball: radius * U^{1/4}
    rho = radius * rng.uniform(0.0, 1.0, size=n_samples) ** 0.25
    z = rho[:, None] * (x[:, 0::2] + 1j * x[:, 1::2])
    grad = jet_at(f, z, 0.0).grad
    norms = 2.0 * np.linalg.norm(grad, axis=-1)
    volume = 0.5 * math.pi ** 2 * radius ** 4
    return float(np.mean(norms) * volume), float(np.std(norms) * volume / math.sqrt(n_samples))


# ============================================================================
# Regularized Slope Bound
# ============================================================================

@dataclass(frozen=True)
class SlopeBoundCheck:
    """M_B(u_eps) against factor * M_A(u) + C_fit * eps (factor 2, or 1 + beta when sharpened)."""
    A: float
    B: float
    epsilon: float
    epsilon_zero: float
    M_B_eps: float
    M_A: float
    factor: float
    C_fit: float
    bound: float
    passed: bool


def epsilon_zero(A: float, B: float, beta: Optional[float] = None) -> float:
    """
    Largest admissible eps for the slope bound.

    Plain: (1/2) min{e^{-A} - e^{-B}, e^{-B}}.
    Sharpened (0 < beta < 1): min{(1/2)(e^{-A} - e^{-B}), beta e^{-B} / (1 + beta)}.

    Examples:
        >>> round(epsilon_zero(2.0, 3.0), 6)
        0.024894
    """
    gap = math.exp(-A) - math.exp(-B)
    if beta is None:
        return 0.5 * min(gap, math.exp(-B))
    if not 0 < beta < 1:
        raise ValueError(f"❌ beta must lie in (0, 1) (got {beta:g})")
    return min(0.5 * gap, beta * math.exp(-B) / (1.0 + beta))


def _max_mollified_slope(f: FunctionSpec, m: Mollifier, B: float, vectors: np.ndarray) -> float:
    base = math.exp(-B) * vectors
    ahead = _mollify(f, m, base * math.exp(SLOPE_STEP))
    here = _mollify(f, m, base)
    return float(np.max((ahead - here) / SLOPE_STEP))


def regularized_slope_bound(f: FunctionSpec, A: float, B: float, m: Mollifier, g: DirectionGrid,
                            beta: Optional[float] = None,
                            calibration: Optional[Sequence[float]] = None) -> SlopeBoundCheck:
    """
    Check M_B(u_eps) <= 2 M_A(u) + C eps (or (1 + beta) M_A(u) + C eps when beta is given).

    Args:
        f: Catalog entry
        A, B: Distances with B > A > 1
        m: Mollifier with eps < epsilon_zero(A, B, beta)
        g: Direction grid searched at t = -B (poles and critical directions are added)
        beta: Sharpened variant parameter
        calibration: Two eps values fitting C as the slope of M_B(u_eps) in eps
            (default eps0/2 and eps0/4)

    Returns:
        SlopeBoundCheck with the fitted C and the verdict

    Raises:
        SupportError: If eps is outside (0, epsilon_zero)
    """
    eps0 = epsilon_zero(A, B, beta)
    is_valid, message = validate_slope_window(A, B, m.epsilon, eps0)
    if not is_valid:
        raise SupportError(message)

    vectors = probe_vectors(f, g)
    M_A = max_directional(f, A, g)
    factor = 2.0 if beta is None else 1.0 + beta

    eps_a, eps_b = calibration if calibration is not None else (0.5 * eps0, 0.25 * eps0)
    fits = [_max_mollified_slope(f, make_mollifier(e), B, vectors) for e in (eps_a, eps_b)]
    C_fit = max(0.0, (fits[0] - fits[1]) / (eps_a - eps_b))

    M_B_eps = _max_mollified_slope(f, m, B, vectors)
    bound = factor * M_A + C_fit * m.epsilon
    check = SlopeBoundCheck(A=A, B=B, epsilon=m.epsilon, epsilon_zero=eps0, M_B_eps=M_B_eps,
                            M_A=M_A, factor=factor, C_fit=C_fit, bound=bound,
                            passed=M_B_eps <= bound + 1e-9)
    logger.info(f"{f.name}: M_B(u_eps)={M_B_eps:.6g} vs {factor:g} M_A + C eps = {bound:.6g} "
                f"(C_fit={C_fit:.3g}) {'PASS' if check.passed else 'FAIL'}")
    return check


# ============================================================================
# Regularization Report
# ============================================================================

_SAMPLE_R_MIN = 0.2
_SAMPLE_R_MAX = 0.8
_MONOTONE_TOL = 1e-8


@dataclass(frozen=True)
class RegularizationReport:
    """Monotonicity, Friedrichs and slope-bound checks of one member over a list of eps."""
    name: str
    epsilons: Tuple[float, ...]
    min_monotone_gap: float  # min of u_eps - u over points and eps
    min_ordering_gap: float  # min of u_eps - u_eps' for consecutive eps > eps'
    gradient_norm: float
    gradient_stderr: float
    delta: float
    friedrichs_ratios: Tuple[float, ...]  # max gap / (2 eps ||grad u||), per eps
    slope_checks: Tuple[SlopeBoundCheck, ...]
    seed: int

    @property
    def monotone(self) -> bool:
        return self.min_monotone_gap >= -_MONOTONE_TOL and self.min_ordering_gap >= -_MONOTONE_TOL

    @property
    def friedrichs_passed(self) -> bool:
        return all(ratio <= 1.0 for ratio in self.friedrichs_ratios)

    @property
    def passed(self) -> bool:
        return self.monotone and self.friedrichs_passed and all(c.passed for c in self.slope_checks)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "epsilons": list(self.epsilons),
            "monotone": self.monotone,
            "min_monotone_gap": self.min_monotone_gap,
            "min_ordering_gap": self.min_ordering_gap,
            "gradient_norm": self.gradient_norm,
            "gradient_stderr": self.gradient_stderr,
            "delta": self.delta,
            "friedrichs_ratios": list(self.friedrichs_ratios),
            "friedrichs_passed": self.friedrichs_passed,
            "slope_checks": [
                {"A": c.A, "B": c.B, "epsilon": c.epsilon, "epsilon_zero": c.epsilon_zero,
                 "M_B_eps": c.M_B_eps, "M_A": c.M_A, "C_fit": c.C_fit, "bound": c.bound,
                 "passed": c.passed}
                for c in self.slope_checks
            ],
            "passed": self.passed,
            "seed": self.seed,
        }


def sample_ball_points(n: int, rng: np.random.Generator, r_min: float = _SAMPLE_R_MIN,
                       r_max: float = _SAMPLE_R_MAX) -> np.ndarray:
    """n points of the shell r_min <= |z| <= r_max, uniform in direction and radius."""
    nodes = random_sphere_nodes(n, rng)
    radii = rng.uniform(r_min, r_max, size=n)
    return radii[:, None] * nodes.vectors


def check_regularization(f: FunctionSpec, epsilons: Sequence[float], g: DirectionGrid,
                         A: float = 2.0, B: float = 3.0, n_monotone: int = 100,
                         n_friedrichs: int = 50, seed: Optional[int] = None) -> RegularizationReport:
    """
    Run the mollifier checks of one member.

    u_eps >= u and u_eps >= u_eps' (eps > eps') at n_monotone random points,
    friedrichs_gap <= 2 eps ||grad u||_{L1(B_{1-delta})} at n_friedrichs points, and the
    regularized slope bound at (A, B) for every eps below epsilon_zero(A, B).

    Args:
        f: Smooth catalog entry
        epsilons: Kernel radii, each < 0.2
        g: Direction grid of the slope searches
        A, B: Distances of the slope bound
        n_monotone, n_friedrichs: Sample sizes
        seed: Seed of the point samples and the L1 norm (recorded)

    Raises:
        SupportError: If an eps does not fit inside the sampled shell
    """
    seed = get_default_seed() if seed is None else seed
    epsilons = tuple(sorted((float(e) for e in epsilons), reverse=True))
    if not epsilons:
        raise SupportError("❌ Need at least one epsilon")
    for eps in epsilons:
        is_valid, message = validate_mollifier_support(eps, _SAMPLE_R_MIN)
        if not is_valid:
            raise SupportError(message)
        if eps < MIN_ACCEPTED_EPSILON:
            logger.warning(f"eps={eps:g} is below {MIN_ACCEPTED_EPSILON:g}; "
                           f"the mollifier quadrature is not calibrated there")

    rng = np.random.default_rng(seed)
    mono_points = sample_ball_points(n_monotone, rng)
    fried_points = sample_ball_points(n_friedrichs, rng)
    mollifiers = [make_mollifier(eps) for eps in epsilons]

    base = values_at(f, mono_points)
    smoothed = [_mollify(f, m, mono_points) for m in mollifiers]
    min_monotone = min(float(np.min(s - base)) for s in smoothed)
    min_ordering = min((float(np.min(a - b)) for a, b in zip(smoothed, smoothed[1:])),
                       default=0.0)

    norm, stderr = gradient_l1_norm(f, seed=seed)
    ratios = []
    for m in mollifiers:
        gaps = [friedrichs_gap(f, m, Point.from_complex(z[0], z[1])) for z in fried_points]
        ratios.append(max(gaps) / (2.0 * m.epsilon * norm) if norm > 0 else 0.0)

    eps0 = epsilon_zero(A, B)
    slope_checks = []
    for m in mollifiers:
        if m.epsilon < eps0:
            slope_checks.append(regularized_slope_bound(f, A, B, m, g))
        else:
            logger.warning(f"{f.name}: eps={m.epsilon:g} >= eps0={eps0:.4g}, slope bound skipped")

    report = RegularizationReport(
        name=f.name, epsilons=epsilons, min_monotone_gap=min_monotone,
        min_ordering_gap=min_ordering, gradient_norm=norm, gradient_stderr=stderr,
        delta=FRIEDRICHS_DELTA, friedrichs_ratios=tuple(ratios),
        slope_checks=tuple(slope_checks), seed=seed,
    )
    logger.info(f"{f.name}: monotone={'PASS' if report.monotone else 'FAIL'} "
                f"friedrichs={'PASS' if report.friedrichs_passed else 'FAIL'} "
                f"slope={'PASS' if all(c.passed for c in slope_checks) else 'FAIL'}")
    return report
