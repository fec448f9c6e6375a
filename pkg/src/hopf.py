"""
Hopf Coordinates for pshlab
Euclidean, real Hopf and complex Hopf coordinates on C^2 minus the origin,
the Hopf projection to CP^1 and the Fubini-Study area element.

Conventions:
    z1 = r sin(theta/2) e^{i(eta+phi)/2},  z2 = r cos(theta/2) e^{i(eta-phi)/2}
    zeta = z1/z2 = tan(theta/2) e^{i phi},  xi = 1/zeta
    omega = i dzeta ^ dzeta-bar / (2 (1+|zeta|^2)^2),  total mass pi
"""

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.constants import CHART_SWITCH_HIGH, CHART_SWITCH_LOW, ETA_PERIOD
from src.errors import ZeroPointError

TWO_PI = 2.0 * math.pi


# ============================================================================
# Domain Types
# ============================================================================

@dataclass(frozen=True)
class Point:
    """Euclidean coordinates of (z1, z2) in C^2."""
    z1_re: float
    z1_im: float
    z2_re: float
    z2_im: float

    @classmethod
    def from_complex(cls, z1: complex, z2: complex) -> "Point":
        return cls(float(z1.real), float(z1.imag), float(z2.real), float(z2.imag))

    @property
    def z1(self) -> complex:
        return complex(self.z1_re, self.z1_im)

    @property
    def z2(self) -> complex:
        return complex(self.z2_re, self.z2_im)

    @property
    def r(self) -> float:
        return math.hypot(math.hypot(self.z1_re, self.z1_im), math.hypot(self.z2_re, self.z2_im))

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2], dtype=complex)

    def rotated(self, angle: float) -> "Point":
        """The diagonal circle action e^{i angle} (z1, z2)."""
        phase = cmath.exp(1j * angle)
        return Point.from_complex(phase * self.z1, phase * self.z2)


@dataclass(frozen=True)
class RealHopf:
    """Real Hopf coordinates (r, eta, theta, phi)."""
    r: float
    eta: float
    theta: float
    phi: float


class Chart(str, Enum):
    ZETA = "Zeta"
    XI = "Xi"


@dataclass(frozen=True)
class Direction:
    """
    A point of CP^1 in one of two affine charts.

    In chart Zeta the coordinate is zeta = z1/z2, in chart Xi it is xi = z2/z1.
    """
    chart: Chart
    w_re: float
    w_im: float

    @property
    def w(self) -> complex:
        return complex(self.w_re, self.w_im)

    @property
    def theta(self) -> float:
        angle = 2.0 * math.atan(abs(self.w))
        return angle if self.chart is Chart.ZETA else math.pi - angle

    @property
    def phi(self) -> float:
        if self.w == 0:
            return 0.0
        arg = cmath.phase(self.w)
        return (arg if self.chart is Chart.ZETA else -arg) % TWO_PI

    def unit_vector(self) -> np.ndarray:
        """Unit vector spanning the line: (zeta, 1) or (1, xi), normalized."""
        norm = math.sqrt(1.0 + abs(self.w) ** 2)
        if self.chart is Chart.ZETA:
            return np.array([self.w / norm, 1.0 / norm], dtype=complex)
        return np.array([1.0 / norm, self.w / norm], dtype=complex)

    def flipped(self) -> "Direction":
        """The same line written in the other chart (w -> 1/w)."""
        if self.w == 0:
            raise ZeroPointError("❌ The pole of one chart has no coordinate in the other")
        inverse = 1.0 / self.w
        other = Chart.XI if self.chart is Chart.ZETA else Chart.ZETA
        return Direction(other, inverse.real, inverse.imag)

    def canonical(self, previous: Optional[Chart] = None) -> "Direction":
        """
        Chart representative with hysteresis around |w| = 1.

        Below CHART_SWITCH_LOW a direction keeps its chart and above CHART_SWITCH_HIGH it
        moves to the other one. Inside the band it follows `previous` (its own chart
        when None), so a sweep through the equator does not flip-flop.
        """
        radius = abs(self.w)
        if radius < CHART_SWITCH_LOW:
            return self
        if radius > CHART_SWITCH_HIGH:
            return self.flipped()
        if previous is None or previous is self.chart:
            return self
        return self.flipped()

    @classmethod
    def from_vector(cls, v) -> "Direction":
        """Direction of the complex line spanned by a nonzero vector v = (v1, v2)."""
        v1, v2 = complex(v[0]), complex(v[1])
        if abs(v1) <= abs(v2):
            zeta = v1 / v2
            return cls(Chart.ZETA, zeta.real, zeta.imag)
        xi = v2 / v1
        return cls(Chart.XI, xi.real, xi.imag)


# ============================================================================
# Coordinate Conversions
# ============================================================================

def hopf_from_point(p: Point) -> RealHopf:
    """
    Convert Euclidean coordinates to real Hopf coordinates.

    Args:
        p: Point with r(p) > 0

    Returns:
        RealHopf with theta = 2 atan2(|z1|, |z2|), phi in [0, 2 pi), eta in [0, 4 pi)

    Raises:
        ZeroPointError: If p is the origin

    Note:
        At the poles phi is free and set to 0, eta then carries the phase of
        the nonzero coordinate.
    """
    r = p.r
    if r == 0:
        raise ZeroPointError("❌ Hopf coordinates are undefined at the origin")

    a1, a2 = abs(p.z1), abs(p.z2)
    theta = 2.0 * math.atan2(a1, a2)
    arg1 = cmath.phase(p.z1) if a1 > 0 else None
    arg2 = cmath.phase(p.z2) if a2 > 0 else None

    if arg1 is None:
        phi = 0.0
        eta = 2.0 * arg2
    elif arg2 is None:
        phi = 0.0
        eta = 2.0 * arg1
    else:
        phi = (arg1 - arg2) % TWO_PI
        eta = 2.0 * arg1 - phi

    return RealHopf(r=r, eta=eta % ETA_PERIOD, theta=theta, phi=phi)


def point_from_hopf(h: RealHopf) -> Point:
    """
    Convert real Hopf coordinates to Euclidean coordinates.

    Examples:
        >>> point_from_hopf(RealHopf(1.0, 0.0, 0.0, 0.0))
        Point(z1_re=0.0, z1_im=0.0, z2_re=1.0, z2_im=0.0)
    """
    half = 0.5 * h.theta
    z1 = h.r * math.sin(half) * cmath.exp(0.5j * (h.eta + h.phi))
    z2 = h.r * math.cos(half) * cmath.exp(0.5j * (h.eta - h.phi))
    return Point.from_complex(z1, z2)


def direction_of(h: RealHopf) -> Direction:
    """
    Hopf projection of a point given in real Hopf coordinates.

    Returns:
        Chart Zeta with zeta = tan(theta/2) e^{i phi} when theta <= pi/2,
        otherwise chart Xi with xi = cot(theta/2) e^{-i phi}
    """
    if h.theta <= 0.5 * math.pi:
        zeta = math.tan(0.5 * h.theta) * cmath.exp(1j * h.phi)
        return Direction(Chart.ZETA, zeta.real, zeta.imag)
    xi = math.tan(0.5 * (math.pi - h.theta)) * cmath.exp(-1j * h.phi)
    return Direction(Chart.XI, xi.real, xi.imag)


def line_point(d: Direction, t: float, eta: float) -> Point:
    """
    Point of the complex line through d on the sphere of radius e^t.

    Args:
        d: Direction of the line
        t: Log-radius
        eta: Fiber angle selecting the point on the circle l_d cap S_{e^t}

    Returns:
        Point whose direction_of equals d
    """
    return point_from_hopf(RealHopf(r=math.exp(t), eta=eta, theta=d.theta, phi=d.phi))


def fs_weight(d: Direction) -> float:
    """
    Fubini-Study density relative to the flat area element of the chart coordinate.

    Examples:
        >>> fs_weight(Direction(Chart.ZETA, 0.0, 0.0))
        0.5
    """
    return 0.5 / (1.0 + abs(d.w) ** 2) ** 2


# ============================================================================
# Vectorized helpers for quadrature nodes
# ============================================================================

def half_angle_logs(theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """log sin(theta/2) and log cos(theta/2) without cancellation near the poles."""
    cos_theta = np.cos(theta)
    with np.errstate(divide="ignore"):
        log_s = 0.5 * np.log(0.5 * (1.0 - cos_theta))
        log_c = 0.5 * np.log(0.5 * (1.0 + cos_theta))
    return log_s, log_c


def slice_vectors(log_s: np.ndarray, log_c: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Unit vectors (sin(theta/2) e^{i phi}, cos(theta/2)) on the eta = phi slice."""
    return np.stack([np.exp(log_s) * np.exp(1j * phi), np.exp(log_c) + 0j], axis=-1)
