"""
Quadrature on CP^1 for pshlab
Direction grids with Fubini-Study weights, their lift to S^3, 1D polar nodes for
toric members, the spherical Laplacian Delta_Theta and finite differences in t.

Measures:
    grid weights are omega-measure (dsigma_2 = 4 omega), summing to pi;
    sphere node weights are dsigma_3-measure, summing to 2 pi^2.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.catalog import (
    FunctionSpec,
    centered,
    layer_rate,
    require_smooth,
    values_at,
    values_on_sphere,
)
from src.constants import (
    ADAPTED_N_PHI,
    DEFAULT_N_PHI,
    DEFAULT_N_THETA,
    FD_STEP_ANGLE,
    FD_STEP_T,
    FD_STEP_T2,
    LAYER_MARGIN,
    MAX_LOG_POLAR_EXTENT,
    PANEL_NODES,
    PANEL_WIDTH,
    TORIC_N_PHI,
)
from src.errors import GridSizeError, SpacingError
from src.hopf import Direction, Point, RealHopf, direction_of
from src.jets import five_point
from src.logger import setup_logger
from src.validators import validate_grid_size, validate_increasing

logger = setup_logger(__name__)


# ============================================================================
# Direction Grids
# ============================================================================

@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """
    Product quadrature on CP^1 in (theta, phi), flattened theta-major.

    log_s, log_c are log sin(theta/2), log cos(theta/2), kept separately so
    nodes within e^{-300} of a pole stay exact.
    """
    theta: np.ndarray
    phi: np.ndarray
    log_s: np.ndarray
    log_c: np.ndarray
    cos_theta: np.ndarray
    sin_theta: np.ndarray
    weights: np.ndarray
    n_theta: int
    n_phi: int
    layout: str = "GaussLegendre"
    x_max: float = 0.0

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @property
    def spec(self) -> str:
        return f"{self.n_theta}x{self.n_phi}"

    def describe(self) -> dict:
        info = {"layout": self.layout, "n_theta": self.n_theta, "n_phi": self.n_phi}
        if self.layout == "LogPolar":
            info["x_max"] = self.x_max
        return info

    @cached_property
    def vectors(self) -> np.ndarray:
        """Slice vectors w = (sin(theta/2) e^{i phi}, cos(theta/2)) of shape (N, 2)."""
        return np.stack([np.exp(self.log_s + 1j * self.phi), np.exp(self.log_c) + 0j], axis=-1)

    @cached_property
    def polar(self) -> Tuple[np.ndarray, np.ndarray]:
        """(log|w_j|, arg w_j) of the slice vectors."""
        log_abs = np.stack([self.log_s, self.log_c], axis=-1)
        arg = np.stack([self.phi, np.zeros_like(self.phi)], axis=-1)
        return log_abs, arg

    @property
    def nodes(self) -> List[Tuple[Direction, float, float]]:
        """(direction, theta, phi) per node; equator nodes keep the chart of their predecessor."""
        out = []
        previous = None
        for th, ph in zip(self.theta, self.phi):
            d = direction_of(RealHopf(1.0, 0.0, th, ph)).canonical(previous)
            previous = d.chart
            out.append((d, float(th), float(ph)))
        return out


def _phi_nodes(n_phi: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n_phi) / n_phi


def _product(theta_parts: Tuple[np.ndarray, ...], theta_weights: np.ndarray, n_phi: int):
    phi = _phi_nodes(n_phi)
    expanded = [np.repeat(part, n_phi) for part in theta_parts]
    weights = np.repeat(theta_weights, n_phi) * (2.0 * math.pi / n_phi) / 4.0
    return expanded, np.tile(phi, theta_weights.size), weights


def make_grid(n_theta: int = DEFAULT_N_THETA, n_phi: int = DEFAULT_N_PHI) -> DirectionGrid:
    """
    Gauss-Legendre nodes in x = cos(theta) crossed with uniform phi.

    Args:
        n_theta: Nodes in cos(theta), >= 8
        n_phi: Nodes in phi, >= 8

    Returns:
        DirectionGrid whose weights (Gauss weight)(2 pi / n_phi)(1/4) sum to pi

    Raises:
        GridSizeError: Below the minimum size
    """
    is_valid, message = validate_grid_size(n_theta, n_phi)
    if not is_valid:
        raise GridSizeError(message)
    x, wx = leggauss(n_theta)
    log_s = 0.5 * np.log(0.5 * (1.0 - x))
    log_c = 0.5 * np.log(0.5 * (1.0 + x))
    (theta, cos_theta, sin_theta, ls, lc), phi, weights = _product(
        (np.arccos(x), x, np.sqrt(1.0 - x * x), log_s, log_c), wx, n_phi)
    return DirectionGrid(theta=theta, phi=phi, log_s=ls, log_c=lc, cos_theta=cos_theta,
                         sin_theta=sin_theta, weights=weights, n_theta=n_theta, n_phi=n_phi)


def _panels(x_max: float, panel_width: float) -> Tuple[np.ndarray, np.ndarray]:
    n_panels = max(2, int(math.ceil(2.0 * x_max / panel_width)))
    edges = np.linspace(-x_max, x_max, n_panels + 1)
    g, gw = leggauss(PANEL_NODES)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * g[None, :]).ravel()
    wx = (half[:, None] * gw[None, :]).ravel()
    return x, wx


def _log_sech(x: np.ndarray) -> np.ndarray:
    return math.log(2.0) - np.logaddexp(x, -x)


def adapted_grid(x_max: float, n_phi: int = TORIC_N_PHI, panel_width: float = PANEL_WIDTH) -> DirectionGrid:
    """
    Log-polar grid: composite Gauss-Legendre panels in x = log tan(theta/2).

    With cos(theta) = -tanh(x) the omega-weights become sech^2(x) dx (2 pi / n_phi) / 4,
    so layers of width e^{-X} around either pole get a fixed number of nodes.

    Args:
        x_max: Half-extent X of the x-interval
        n_phi: Uniform phi nodes
        panel_width: Width of one 8-node panel

    Raises:
        GridSizeError: If n_phi is below the minimum
    """
    is_valid, message = validate_grid_size(PANEL_NODES * 2, n_phi)
    if not is_valid:
        raise GridSizeError(message)
    x_max = min(float(x_max), MAX_LOG_POLAR_EXTENT)
    x, wx = _panels(x_max, panel_width)
    log_sech = _log_sech(x)
    log_s = -0.5 * np.logaddexp(0.0, -2.0 * x)
    log_c = -0.5 * np.logaddexp(0.0, 2.0 * x)
    theta = 2.0 * np.arctan(np.exp(x))
    (theta, cos_theta, sin_theta, ls, lc), phi, weights = _product(
        (theta, -np.tanh(x), np.exp(log_sech), log_s, log_c), np.exp(2.0 * log_sech) * wx, n_phi)
    return DirectionGrid(theta=theta, phi=phi, log_s=ls, log_c=lc, cos_theta=cos_theta,
                         sin_theta=sin_theta, weights=weights, n_theta=x.size, n_phi=n_phi,
                         layout="LogPolar", x_max=x_max)


def resolvable_depth(f: FunctionSpec) -> float:
    """Deepest t whose boundary layer the capped log-polar grid still resolves."""
    rate = layer_rate(f)
    if rate <= 0:
        return -math.inf
    return -(MAX_LOG_POLAR_EXTENT - LAYER_MARGIN) / rate


def grid_for(f: FunctionSpec, t_min: float, n_theta: int = DEFAULT_N_THETA,
             n_phi: int = DEFAULT_N_PHI) -> DirectionGrid:
    """
    Grid resolving u_t for every t >= t_min.

    Layer-free members (and Custom kinds) get make_grid(n_theta, n_phi); members with
    critical directions get adapted_grid(16 + rate |t_min|). f must already be centered.
    """
    rate = layer_rate(f)
    if rate <= 0 or f.form is None:
        return make_grid(n_theta, n_phi)
    x_max = LAYER_MARGIN + rate * abs(min(t_min, 0.0))
    if x_max > MAX_LOG_POLAR_EXTENT:
        logger.warning(f"{f.name}: layer at t={t_min:g} needs x_max={x_max:.0f}, "
                       f"capped at {MAX_LOG_POLAR_EXTENT:.0f}")
    phis = TORIC_N_PHI if f.toric else min(n_phi, ADAPTED_N_PHI)
    grid = adapted_grid(x_max, phis)
    logger.debug(f"{f.name}: log-polar grid x_max={grid.x_max:.1f}, {grid.size} nodes")
    return grid


def clamp_schedule(f: FunctionSpec, schedule: Sequence[float]) -> List[float]:
    """Drop t-values deeper than resolvable_depth(f), warning once."""
    floor = resolvable_depth(f)
    kept = [t for t in schedule if t >= floor]
    if len(kept) < len(schedule):
        logger.warning(f"{f.name}: schedule clamped to t >= {floor:.2f} "
                       f"({len(schedule) - len(kept)} values dropped)")
    return kept


def prepare(f: FunctionSpec, t_min: float, n_theta: int = DEFAULT_N_THETA,
            n_phi: int = DEFAULT_N_PHI) -> Tuple[FunctionSpec, DirectionGrid]:
    """Center f on its critical direction and build the grid that resolves it down to t_min."""
    fc = centered(f)
    return fc, grid_for(fc, t_min, n_theta, n_phi)


def _ordered_sum(products: np.ndarray) -> float:
    # np.add.reduce on a contiguous 1D float64 array is numpy's pairwise summation;
    # its order depends only on the length
    return float(np.add.reduce(np.ascontiguousarray(products, dtype=np.float64).ravel()))


def integrate(values: np.ndarray, g: DirectionGrid) -> float:
    """
    Sum of values times weights (omega-measure) as a deterministic pairwise reduction.

    Examples:
        >>> integrate(np.ones(make_grid(8, 8).size), make_grid(8, 8))  # doctest: +ELLIPSIS
        3.14159265358979...
    """
    return _ordered_sum(np.asarray(values) * g.weights)


# ============================================================================
# S^3 Nodes and 1D Polar Nodes
# ============================================================================

@dataclass(frozen=True, eq=False)
class SphereNodes:
    """Unit vectors of S^3 with dsigma_3 weights (total 2 pi^2)."""
    vectors: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.weights.size)


def sphere_nodes(g: DirectionGrid, n_psi: int) -> SphereNodes:
    """
    Lift a direction grid to S^3 with Hopf-fiber phases e^{i psi}, psi uniform.

    Each fiber point e^{i psi} w has eta = phi + 2 psi, so n_psi uniform phases
    cover eta in [0, 4 pi) and carry weight (grid weight) 2 pi / n_psi.
    """
    psi = 2.0 * math.pi * np.arange(n_psi) / n_psi
    phases = np.exp(1j * psi)
    vectors = (g.vectors[:, None, :] * phases[None, :, None]).reshape(-1, 2)
    weights = np.repeat(g.weights * (2.0 * math.pi / n_psi), n_psi)
    return SphereNodes(vectors=vectors, weights=weights)


def integrate_sphere(values: np.ndarray, nodes: SphereNodes) -> float:
    """Sum of values times dsigma_3 weights, reduced like integrate."""
    return _ordered_sum(np.asarray(values) * nodes.weights)


def random_sphere_nodes(n: int, rng: np.random.Generator) -> SphereNodes:
    x = rng.standard_normal((n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return SphereNodes(vectors=x[:, 0::2] + 1j * x[:, 1::2],
                       weights=np.full(n, 2.0 * math.pi ** 2 / n))


@dataclass(frozen=True, eq=False)
class PolarNodes:
    """1D nodes in theta with dtheta weights (total 2 over [0, pi])."""
    theta: np.ndarray
    sin_theta: np.ndarray
    cos_theta: np.ndarray
    log_s: np.ndarray
    log_c: np.ndarray
    weights: np.ndarray


def polar_nodes(f: FunctionSpec, t_min: float, n_theta: int = DEFAULT_N_THETA) -> PolarNodes:
    """
    Theta-nodes for toric 1D integrals.

    Layer-free members use Gauss-Legendre in theta; otherwise the log-polar x-panels
    with dtheta = sech(x) dx.
    """
    rate = layer_rate(f)
    if rate <= 0 or f.form is None:
        x, wx = leggauss(n_theta)
        theta = 0.5 * math.pi * (x + 1.0)
        weights = 0.5 * math.pi * wx
        half = 0.5 * theta
        return PolarNodes(theta=theta, sin_theta=np.sin(theta), cos_theta=np.cos(theta),
                          log_s=np.log(np.sin(half)), log_c=np.log(np.cos(half)), weights=weights)
    x_max = min(LAYER_MARGIN + rate * abs(t_min), MAX_LOG_POLAR_EXTENT)
    x, wx = _panels(x_max, PANEL_WIDTH)
    log_sech = _log_sech(x)
    return PolarNodes(theta=2.0 * np.arctan(np.exp(x)), sin_theta=np.exp(log_sech),
                      cos_theta=-np.tanh(x), log_s=-0.5 * np.logaddexp(0.0, -2.0 * x),
                      log_c=-0.5 * np.logaddexp(0.0, 2.0 * x), weights=np.exp(log_sech) * wx)


# ============================================================================
# Spherical Jets and the Laplacian
# ============================================================================

@dataclass
class SphericalJet:
    """
    Derivatives of u_t along the slice w = (sin(theta/2) e^{i phi}, cos(theta/2)).

    u_phi_s and udot_phi_s are the phi-derivatives divided by sin(theta); lap is
    Delta_Theta u_t, the round Laplacian of S^2; trace is e^{2t} tr(u_{j kbar}).
    """
    u: np.ndarray
    u_dot: np.ndarray
    u_ddot: np.ndarray
    u_theta: np.ndarray
    u_phi_s: np.ndarray
    udot_theta: np.ndarray
    udot_phi_s: np.ndarray
    lap: np.ndarray
    trace: np.ndarray

    def grad_dot(self, other_theta: np.ndarray, other_phi_s: np.ndarray) -> np.ndarray:
        return self.u_theta * other_theta + self.u_phi_s * other_phi_s

    @property
    def grad_sq(self) -> np.ndarray:
        return self.u_theta ** 2 + self.u_phi_s ** 2


def _phi_over_sin(grad: np.ndarray, g_log_s, g_log_c, phi, invariant: bool) -> np.ndarray:
    """u_phi / sin(theta) from the scaled gradient, evaluated on the better-conditioned hemisphere."""
    s = np.exp(g_log_s)
    c = np.exp(g_log_c)
    with np.errstate(divide="ignore", invalid="ignore"):
        north = -np.imag(grad[..., 0] * np.exp(1j * phi)) / c
        if not invariant:
            return north
        # circle invariance gives Im(g . w) = 0, hence the second form
        south = np.imag(grad[..., 1]) / s
    return np.where(c >= s, north, south)


def _analytic_jet(f: FunctionSpec, t: float, log_s, log_c, phi) -> SphericalJet:
    log_abs = np.stack([log_s, log_c], axis=-1)
    arg = np.stack([phi, np.zeros_like(phi)], axis=-1)
    jet = f.form.jet(log_abs, arg, t)
    s, c = np.exp(log_s), np.exp(log_c)
    e = np.exp(1j * phi)
    w = np.stack([s * e, c + 0j], axis=-1)
    w_theta = np.stack([0.5 * c * e, -0.5 * s + 0j], axis=-1)

    g = jet.grad
    hh_w = np.einsum("...jk,...k->...j", jet.hess_holo, w)
    hm_wbar = np.einsum("...jk,...k->...j", jet.hess_mixed, np.conj(w))
    u_dot = 2.0 * np.real(np.sum(g * w, axis=-1))
    u_ddot = 2.0 * np.real(np.sum(w * hh_w, axis=-1) + np.sum(w * hm_wbar, axis=-1)
                           + np.sum(g * w, axis=-1))
    g_dot = g + hh_w + hm_wbar
    invariant = f.s1_invariant
    trace = np.real(jet.hess_mixed[..., 0, 0] + jet.hess_mixed[..., 1, 1])
    return SphericalJet(
        u=jet.value + f.shift,
        u_dot=u_dot,
        u_ddot=u_ddot,
        u_theta=2.0 * np.real(np.sum(g * w_theta, axis=-1)),
        u_phi_s=_phi_over_sin(g, log_s, log_c, phi, invariant),
        udot_theta=2.0 * np.real(np.sum(g_dot * w_theta, axis=-1)),
        udot_phi_s=_phi_over_sin(g_dot, log_s, log_c, phi, invariant),
        lap=trace - 0.25 * (u_ddot + 2.0 * u_dot),
        trace=trace,
    )


def _slice(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    half = 0.5 * theta
    return np.stack([np.sin(half) * np.exp(1j * phi), np.cos(half) + 0j], axis=-1)


def _stencil_jet(f: FunctionSpec, t: float, theta: np.ndarray, phi: np.ndarray) -> SphericalJet:
    """Five-point stencils in (t, theta, phi) for kinds without closed-form jets."""
    h, h2, k = FD_STEP_T, FD_STEP_T2, FD_STEP_ANGLE
    offsets = (-2, -1, 0, 1, 2)

    def u_at(dt=0.0, dth=0.0, dph=0.0) -> np.ndarray:
        return values_on_sphere(f, t + dt, _slice(theta + dth, phi + dph))

    def dot_at(dth=0.0, dph=0.0) -> np.ndarray:
        return five_point([u_at(i * h, dth, dph) for i in offsets], h)[0]

    center = u_at()
    u_dot = dot_at()
    _, u_ddot = five_point([u_at(i * h2) for i in offsets], h2)
    u_theta, u_thth = five_point([u_at(dth=i * k) for i in offsets], k)
    u_phi, u_phph = five_point([u_at(dph=i * k) for i in offsets], k)
    udot_theta, _ = five_point([dot_at(dth=i * k) for i in offsets], k)
    udot_phi, _ = five_point([dot_at(dph=i * k) for i in offsets], k)

    sin_theta = np.sin(theta)
    lap = u_thth + np.cos(theta) / sin_theta * u_theta + u_phph / sin_theta ** 2
    return SphericalJet(
        u=center, u_dot=u_dot, u_ddot=u_ddot, u_theta=u_theta, u_phi_s=u_phi / sin_theta,
        udot_theta=udot_theta, udot_phi_s=udot_phi / sin_theta, lap=lap,
        trace=lap + 0.25 * (u_ddot + 2.0 * u_dot),
    )


def sphere_jet(f: FunctionSpec, t: float, g: DirectionGrid) -> SphericalJet:
    """
    Derivatives of u_t at every grid node.

    Raises:
        SmoothnessError: For MaxOfLogs and other non-smooth kinds
    """
    require_smooth(f, "The spherical Laplacian")
    if f.form is not None:
        return _analytic_jet(f, t, g.log_s, g.log_c, g.phi)
    return _stencil_jet(f, t, g.theta, g.phi)


def polar_jet(f: FunctionSpec, t: float, nodes: PolarNodes) -> SphericalJet:
    """Spherical jet on phi = 0 along 1D polar nodes."""
    require_smooth(f, "The spherical Laplacian")
    phi = np.zeros_like(nodes.theta)
    if f.form is not None:
        return _analytic_jet(f, t, nodes.log_s, nodes.log_c, phi)
    return _stencil_jet(f, t, nodes.theta, phi)


def point_jet(f: FunctionSpec, t: float, theta: float, phi: float) -> SphericalJet:
    """Spherical jet at a single (t, theta, phi)."""
    half = 0.5 * theta
    with np.errstate(divide="ignore"):
        log_s = np.log(np.array([math.sin(half)]))
        log_c = np.log(np.array([math.cos(half)]))
    require_smooth(f, "The spherical Laplacian")
    if f.form is not None:
        return _analytic_jet(f, t, log_s, log_c, np.array([phi]))
    return _stencil_jet(f, t, np.array([theta]), np.array([phi]))


def sphere_laplacian(f: FunctionSpec, t: float, g: DirectionGrid) -> np.ndarray:
    """
    Delta_Theta u_t at every node.

    Analytic kinds use the trace identity Delta_Theta = e^{2t} tr(u_{j kbar}) - (u_ddot + 2 u_dot)/4,
    Custom kinds five-point stencils in (theta, phi).

    Raises:
        SmoothnessError: For MaxOfLogs
    """
    return sphere_jet(f, t, g).lap


# ============================================================================
# Finite Differences in t
# ============================================================================

def t_derivative(samples: Sequence[Tuple[float, float]], order: int = 1) -> np.ndarray:
    """
    Derivative of sampled values in t.

    Args:
        samples: (t, value) pairs with strictly increasing t, at least 3
        order: 1 (centered interior, one-sided ends) or 2 (second differences)

    Returns:
        Array of derivatives, one per sample

    Raises:
        SpacingError: If t is not strictly increasing or has fewer than 3 samples
    """
    ts = np.array([s[0] for s in samples], dtype=float)
    values = np.array([s[1] for s in samples], dtype=float)
    is_valid, message = validate_increasing(ts, minimum=3)
    if not is_valid:
        raise SpacingError(message)
    if order == 1:
        return np.gradient(values, ts)
    if order != 2:
        raise ValueError(f"❌ order must be 1 or 2 (got {order})")
    h = np.diff(ts)
    slopes = np.diff(values) / h
    inner = 2.0 * np.diff(slopes) / (h[1:] + h[:-1])
    return np.concatenate([[inner[0]], inner, [inner[-1]]])


def euclidean_laplacian(f: FunctionSpec, p: Point, step_rel: float = 1e-3) -> float:
    """Delta_e u at p by five-point central differences along the four real axes."""
    z = p.as_array()
    h = step_rel * p.r
    axes = np.array([[1, 0], [1j, 0], [0, 1], [0, 1j]], dtype=complex)

    total = 0.0
    for axis in axes:
        stencil = values_at(f, np.array([z + i * h * axis for i in (-2, -1, 0, 1, 2)]))
        total += float(five_point(list(stencil), h)[1])
    return total
