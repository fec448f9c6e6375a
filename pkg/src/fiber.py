"""
Fiber Calculus for pshlab
Functionals of u_t on the boundary sphere S_{e^t}: I, J, the energy E, the cross term
and K = pi^{-1} MA(u)(B_{e^t}) from the decomposition formula, plus the independent
3-form density of d^c u ^ dd^c u that checks it.
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np

from src.catalog import FunctionSpec, require_smooth
from src.constants import MONOTONE_TOL
from src.errors import DomainError
from src.hopf import RealHopf
from src.logger import setup_logger
from src.quadrature import DirectionGrid, SphericalJet, integrate, point_jet, sphere_jet
from src.validators import validate_log_radius

logger = setup_logger(__name__)


# ============================================================================
# Domain Types
# ============================================================================

@dataclass
class FiberField:
    """Samples of u_t, its t-derivatives and Delta_Theta u_t at every grid node."""
    t: float
    u: np.ndarray
    u_dot: np.ndarray
    u_ddot: np.ndarray
    lap: np.ndarray
    jet: SphericalJet


@dataclass(frozen=True)
class FunctionalRecord:
    """
    Functionals at one log-radius t.

    I = int u_dot omega, J = int u_dot^2 omega, E = -int u Delta_omega u omega,
    cross = 2 int u_dot Delta_omega u omega, K = cross + J, nu_r = I / pi,
    script_I = int u omega. E_grad is the gradient form of E and
    dE_direct = -cross the quadrature of dE/dt.
    """
    t: float
    I: float
    J: float
    E: float
    cross: float
    K: float
    nu_r: float
    script_I: float
    E_grad: float
    dE_direct: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


# ============================================================================
# Fields and Functionals
# ============================================================================

def _check_t(t: float):
    is_valid, message = validate_log_radius(t)
    if not is_valid:
        raise DomainError(message)


def fiber_field(f: FunctionSpec, t: float, g: DirectionGrid) -> FiberField:
    """
    Sample u_t, u_dot, u_ddot and Delta_Theta u_t on a grid.

    Args:
        f: Smooth catalog entry (centered when g is a log-polar grid)
        t: Log-radius, t < 0
        g: Direction grid

    Returns:
        FiberField at t

    Raises:
        SmoothnessError: For MaxOfLogs
        DomainError: If t >= 0
    """
    require_smooth(f, "fiber_field")
    _check_t(t)
    jet = sphere_jet(f, t, g)
    lowest = float(np.min(jet.u_dot))
    if lowest < -MONOTONE_TOL * max(1.0, float(np.max(np.abs(jet.u_dot)))):
        logger.warning(f"{f.name}: u_dot = {lowest:.3e} < 0 at t={t:g}, u is not monotone in t")
    return FiberField(t=t, u=jet.u, u_dot=jet.u_dot, u_ddot=jet.u_ddot, lap=jet.lap, jet=jet)


def functionals(field: FiberField, g: DirectionGrid) -> FunctionalRecord:
    """
    Integrate the fiber functionals of one field.

    Args:
        field: FiberField sampled on g
        g: The same grid

    Returns:
        FunctionalRecord; K is the decomposition value of pi^{-1} MA(u)(B_{e^t})

    Examples:
        For log|z| every record has I = J = K = pi, cross = E = 0.
    """
    if field.u.size != g.size:
        raise ValueError(f"❌ Field has {field.u.size} samples, grid has {g.size} nodes")
    I = integrate(field.u_dot, g)
    J = integrate(field.u_dot ** 2, g)
    cross = 4.0 * integrate(field.u_dot * field.lap, g)
    E = -2.0 * integrate(field.u * field.lap, g)
    E_grad = 2.0 * integrate(field.jet.grad_sq, g)
    return FunctionalRecord(
        t=field.t,
        I=I,
        J=J,
        E=E,
        cross=cross,
        K=cross + J,
        nu_r=I / math.pi,
        script_I=integrate(field.u, g),
        E_grad=E_grad,
        dE_direct=-cross,
    )


def record_at(f: FunctionSpec, t: float, g: DirectionGrid) -> FunctionalRecord:
    return functionals(fiber_field(f, t, g), g)


# ============================================================================
# The 3-form Path
# ============================================================================

def _threeform_bracket(jet: SphericalJet) -> np.ndarray:
    """2 (u_dot Delta_Theta u - <grad u, grad u_dot>) + u_dot^2, the density times (1+|zeta|^2)^2."""
    return (2.0 * (jet.u_dot * jet.lap - jet.grad_dot(jet.udot_theta, jet.udot_phi_s))
            + jet.u_dot ** 2)


def threeform_density(f: FunctionSpec, h: RealHopf) -> float:
    """
    Density of 8 d^c u ^ dd^c u against i dzeta ^ dzeta-bar ^ deta at h.

    Returns:
        2(ru_r u_{zeta zeta-bar} - Re{u_{zeta-bar} (ru_r)_zeta}) + (ru_r)^2/(1+|zeta|^2)^2

    Examples:
        For log|z| this is 1/(1+|zeta|^2)^2.
    """
    require_smooth(f, "threeform_density")
    jet = point_jet(f, math.log(h.r), h.theta, h.phi)
    # 1/(1+|zeta|^2)^2 = cos^4(theta/2)
    return float(_threeform_bracket(jet)[0] * math.cos(0.5 * h.theta) ** 4)


def threeform_mass(f: FunctionSpec, t: float, g: DirectionGrid) -> float:
    """
    pi^{-1} int_{S_{e^t}} d^c u ^ dd^c u from the 3-form density.

    The eta-integral contributes 4 pi, i dzeta ^ dzeta-bar = 2 (1+|zeta|^2)^2 omega,
    and the 8 in the density cancels against both.
    """
    require_smooth(f, "threeform_mass")
    _check_t(t)
    return integrate(_threeform_bracket(sphere_jet(f, t, g)), g)


def dc_form_components(f: FunctionSpec, h: RealHopf) -> Tuple[float, float, float]:
    """
    Coefficients of 4 d^c u on S_r in the coframe (d eta, d phi, d theta).

    Returns:
        (ru_r, 2 sin(theta) u_theta - cos(theta) ru_r, -2 u_phi / sin(theta))
    """
    require_smooth(f, "dc_form_components")
    jet = point_jet(f, math.log(h.r), h.theta, h.phi)
    ru_r = float(jet.u_dot[0])
    c_phi = 2.0 * math.sin(h.theta) * float(jet.u_theta[0]) - math.cos(h.theta) * ru_r
    c_theta = -2.0 * float(jet.u_phi_s[0])
    return ru_r, c_phi, c_theta


def quasi_psh_defect(field: FiberField) -> float:
    """
    min over nodes of (u_ddot + 2 u_dot)/2 + Delta_omega u_t.

    This is 2 e^{2t} tr(u_{j kbar}), so it is >= 0 (up to noise) for psh u.
    """
    return float(np.min(0.5 * (field.u_ddot + 2.0 * field.u_dot) + 2.0 * field.lap))
