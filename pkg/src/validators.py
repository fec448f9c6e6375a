"""
Validation Functions for pshlab
Reusable checks of grids, schedules, radii and mollifier windows.
"""

import re
from typing import Sequence, Tuple

import numpy as np

from src.constants import MIN_GRID_NODES


def validate_grid_size(n_theta: int, n_phi: int) -> Tuple[bool, str]:
    """
    Validate the size of a product direction grid.

    Args:
        n_theta: Gauss-Legendre nodes in cos(theta)
        n_phi: Uniform nodes in phi

    Returns:
        Tuple of (is_valid: bool, error_message: str)
        If valid, error_message is empty string

    Examples:
        >>> validate_grid_size(64, 128)
        (True, "")
        >>> validate_grid_size(4, 128)
        (False, "❌ Grid needs n_theta >= 8 and n_phi >= 8 (got 4x128)")
    """
    if n_theta < MIN_GRID_NODES or n_phi < MIN_GRID_NODES:
        return False, (
            f"❌ Grid needs n_theta >= {MIN_GRID_NODES} and n_phi >= {MIN_GRID_NODES} "
            f"(got {n_theta}x{n_phi})"
        )
    return True, ""


def validate_grid_spec(text: str) -> Tuple[bool, str]:
    """
    Validate a CLI grid string of the form NxM.

    Examples:
        >>> validate_grid_spec("64x128")
        (True, "")
        >>> validate_grid_spec("64")
        (False, "❌ Grid must look like NxM, e.g. 64x128 (got '64')")
    """
    match = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text or "")
    if not match:
        return False, f"❌ Grid must look like NxM, e.g. 64x128 (got {text!r})"
    return validate_grid_size(int(match.group(1)), int(match.group(2)))


def validate_increasing(values: Sequence[float], minimum: int = 3) -> Tuple[bool, str]:
    """
    Validate a strictly increasing sample grid with at least `minimum` points.

    Examples:
        >>> validate_increasing([-3.0, -2.0, -1.0])
        (True, "")
        >>> validate_increasing([-1.0, -2.0, -3.0])
        (False, "❌ Samples must be strictly increasing")
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < minimum:
        return False, f"❌ Need at least {minimum} samples (got {arr.size})"
    if not np.all(np.isfinite(arr)):
        return False, "❌ Samples must be finite"
    if np.any(np.diff(arr) <= 0):
        return False, "❌ Samples must be strictly increasing"
    return True, ""


def validate_t_schedule(schedule: Sequence[float], decreasing: bool = True,
                        deepest: float = None) -> Tuple[bool, str]:
    """
    Validate a log-radius schedule.

    Args:
        schedule: Values of t = log r
        decreasing: Whether the schedule must run towards the origin
        deepest: If given, min(schedule) must not exceed this value

    Returns:
        Tuple of (is_valid: bool, error_message: str)
    """
    arr = np.asarray(schedule, dtype=float)
    if arr.size < 2:
        return False, f"❌ Schedule needs at least 2 values (got {arr.size})"
    if np.any(arr >= 0) or not np.all(np.isfinite(arr)):
        return False, "❌ Schedule values must be finite and negative (t = log r < 0)"
    steps = np.diff(arr)
    if decreasing and np.any(steps >= 0):
        return False, "❌ Schedule must be strictly decreasing"
    if not decreasing and np.any(steps <= 0):
        return False, "❌ Schedule must be strictly increasing"
    if deepest is not None and arr.min() > deepest:
        return False, f"❌ Schedule must reach t <= {deepest} (deepest is {arr.min():g})"
    return True, ""


def validate_log_radius(t: float) -> Tuple[bool, str]:
    """
    Validate a log-radius inside the unit ball.

    Examples:
        >>> validate_log_radius(-2.0)
        (True, "")
        >>> validate_log_radius(0.0)
        (False, "❌ Log-radius must be negative (got 0)")
    """
    if not np.isfinite(t) or t >= 0:
        return False, f"❌ Log-radius must be negative (got {t:g})"
    return True, ""


def validate_radius(r: float) -> Tuple[bool, str]:
    """
    Validate a radius of a ball or sphere in B1.

    Examples:
        >>> validate_radius(0.5)
        (True, "")
        >>> validate_radius(1.0)
        (False, "❌ Radius must lie in (0, 1) (got 1)")
    """
    if not np.isfinite(r) or r <= 0 or r >= 1:
        return False, f"❌ Radius must lie in (0, 1) (got {r:g})"
    return True, ""


def validate_mollifier_support(epsilon: float, r: float) -> Tuple[bool, str]:
    """
    Validate that the epsilon-ball around a point of radius r stays in B1 minus the origin.

    Examples:
        >>> validate_mollifier_support(0.01, 0.5)
        (True, "")
        >>> validate_mollifier_support(0.6, 0.5)
        (False, "❌ Mollifier support leaves the domain: epsilon=0.6 needs epsilon < 0.5")
    """
    limit = min(r, 1.0 - r)
    if epsilon <= 0:
        return False, f"❌ Epsilon must be positive (got {epsilon:g})"
    if epsilon >= limit:
        return False, (
            f"❌ Mollifier support leaves the domain: epsilon={epsilon:g} "
            f"needs epsilon < {limit:g}"
        )
    return True, ""


def validate_slope_window(A: float, B: float, epsilon: float, epsilon_zero: float) -> Tuple[bool, str]:
    """
    Validate the (A, B, epsilon) window of the regularized slope bound.

    Examples:
        >>> validate_slope_window(2.0, 3.0, 0.01, 0.0249)
        (True, "")
        >>> validate_slope_window(3.0, 2.0, 0.01, 0.0249)
        (False, "❌ Need B > A > 1 (got A=3, B=2)")
    """
    if not (B > A > 1):
        return False, f"❌ Need B > A > 1 (got A={A:g}, B={B:g})"
    if not (0 < epsilon < epsilon_zero):
        return False, f"❌ Epsilon must lie in (0, {epsilon_zero:.6g}) (got {epsilon:g})"
    return True, ""


def validate_distance_schedule(schedule: Sequence[float], reach: float = None) -> Tuple[bool, str]:
    """
    Validate an increasing schedule of distances A > 0.

    Examples:
        >>> validate_distance_schedule([2, 5, 10, 20], reach=20)
        (True, "")
        >>> validate_distance_schedule([2, 5], reach=20)
        (False, "❌ A-schedule must reach 20 (max is 5)")
    """
    arr = np.asarray(schedule, dtype=float)
    if arr.size < 2:
        return False, f"❌ A-schedule needs at least 2 values (got {arr.size})"
    if np.any(arr <= 0) or np.any(np.diff(arr) <= 0):
        return False, "❌ A-schedule must be positive and strictly increasing"
    if reach is not None and arr.max() < reach:
        return False, f"❌ A-schedule must reach {reach:g} (max is {arr.max():g})"
    return True, ""


def validate_param_range(text: str, families: Sequence[str]) -> Tuple[bool, str]:
    """
    Validate a sweep range `family:lo..hi` (integers) or `family:v1,v2,...`.

    Examples:
        >>> validate_param_range("demailly:1..5", ["demailly"])
        (True, "")
        >>> validate_param_range("demailly:5..1", ["demailly"])
        (False, "❌ Range 5..1 is empty")
    """
    match = re.fullmatch(r"\s*([a-z0-9-]+)\s*:\s*(\S+)\s*", text or "")
    if not match:
        return False, f"❌ Parameter range must look like family:1..5 or family:0.5,1,2 (got {text!r})"
    family, values = match.groups()
    if family not in families:
        return False, f"❌ Unknown sweep family {family!r} (choose from {', '.join(families)})"
    bounds = re.fullmatch(r"(\d+)\.\.(\d+)", values)
    if bounds:
        lo, hi = int(bounds.group(1)), int(bounds.group(2))
        if lo > hi:
            return False, f"❌ Range {lo}..{hi} is empty"
        return True, ""
    try:
        numbers = [float(v) for v in values.split(",")]
    except ValueError:
        return False, f"❌ Not a list of numbers: {values!r}"
    if any(not np.isfinite(v) or v <= 0 for v in numbers):
        return False, "❌ Sweep values must be positive"
    return True, ""
