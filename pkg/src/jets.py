"""
Derivative Jets for pshlab
Values, complex gradients and complex Hessians of catalog functions at batches of points.

Two engines:
    LogSumForm  - u = c log sum_k |h_k|^{2 p_k} with polynomial h_k, in closed form
    finite_difference_jet - 4D central differences for Custom kinds

Jets are scaled: grad = e^t du/dz_j, hess_mixed = e^{2t} u_{j kbar}, hess_holo = e^{2t} u_{jk},
where t is the log-scale passed in (0 for unscaled derivatives at arbitrary points).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from src.constants import FD_STEP_HESSIAN_REL
from src.polynomials import Polynomial


# ============================================================================
# Jet Container
# ============================================================================

@dataclass
class Jet:
    """Value and scaled first/second complex derivatives at N points."""
    value: np.ndarray  # (N,)
    grad: np.ndarray  # (N, 2)
    hess_mixed: np.ndarray  # (N, 2, 2) Hermitian
    hess_holo: np.ndarray  # (N, 2, 2) symmetric
    det_mixed: np.ndarray  # (N,) det(hess_mixed), real and >= 0 for psh functions


def polar_parts(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """log|z_j| (-inf at zeros) and arg z_j for an array of shape (..., 2)."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(z)), np.angle(z)


def _times_log(power: float, log_abs: np.ndarray) -> np.ndarray:
    # power * log|h| with 0 * (-inf) read as 0
    if power == 0:
        return np.zeros_like(log_abs)
    return power * log_abs


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...j,...k->...jk", a, b)


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


# ============================================================================
# Log-sum Engine
# ============================================================================

@dataclass(frozen=True)
class LogSumTerm:
    poly: Polynomial
    power: float = 1.0

    @cached_property
    def first(self) -> Tuple[Polynomial, Polynomial]:
        return self.poly.derivative(0), self.poly.derivative(1)

    @cached_property
    def second(self) -> Tuple[Tuple[Polynomial, Polynomial], Tuple[Polynomial, Polynomial]]:
        d1, d2 = self.first
        d12 = d1.derivative(1)
        return (d1.derivative(0), d12), (d12, d2.derivative(1))

    @property
    def min_weight(self) -> float:
        return self.power * self.poly.min_degree

    @property
    def max_weight(self) -> float:
        return self.power * self.poly.degree


@dataclass(frozen=True)
class LogSumForm:
    """
    u(z) = coef * log sum_k |h_k(z)|^{2 p_k}.

    All evaluations run on log|h_k| and arg h_k, so nothing underflows when
    z = e^t w with t far below the float exponent range of e^{2t}.

    Note:
        The complex Hessian is assembled from the rank-one pieces
        pi_k pi_l d_kl d_kl^* (d_kl = p_k dh_k/h_k - p_l dh_l/h_l), which keeps it
        positive semi-definite and makes det exactly 0 for two-term sums.
    """
    coef: float
    terms: Tuple[LogSumTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("❌ A log-sum needs at least one term")
        for term in self.terms:
            if term.power < 1:
                raise ValueError(f"❌ Log-sum exponents must be >= 1 (got {term.power})")

    # --------------------------------------------------------------- values

    def _term_logs(self, log_abs, arg, t) -> List[Tuple[np.ndarray, np.ndarray]]:
        return [term.poly.log_eval(log_abs, arg, t) for term in self.terms]

    def log_sum(self, log_abs: np.ndarray, arg: np.ndarray, t: float = 0.0) -> np.ndarray:
        """log sum_k |h_k|^{2 p_k} at z = e^t * exp(log_abs + i arg)."""
        logs = np.stack([2.0 * term.power * lm for term, (lm, _) in
                         zip(self.terms, self._term_logs(log_abs, arg, t))])
        with np.errstate(divide="ignore", invalid="ignore"):
            return logsumexp(logs, axis=0)

    def value(self, log_abs: np.ndarray, arg: np.ndarray, t: float = 0.0) -> np.ndarray:
        if self.coef == 0:
            return np.zeros(np.shape(log_abs)[:-1])
        return self.coef * self.log_sum(log_abs, arg, t)

    # ---------------------------------------------------------------- jets

    def jet(self, log_abs: np.ndarray, arg: np.ndarray, t: float = 0.0) -> Jet:
        """
        Closed-form jet at z = e^t * exp(log_abs + i arg).

        Args:
            log_abs: (N, 2) log|w_j|
            arg: (N, 2) arg w_j
            t: Log-scale; derivatives are returned multiplied by e^t and e^{2t}

        Returns:
            Jet with the scaled gradient and Hessians
        """
        shape = np.shape(log_abs)[:-1]
        parts = self._term_logs(log_abs, arg, t)
        logs = np.stack([2.0 * term.power * lm for term, (lm, _) in zip(self.terms, parts)])
        with np.errstate(divide="ignore", invalid="ignore"):
            lse = logsumexp(logs, axis=0)

        sqrt_pi = []  # sqrt of the softmax weights
        v = []  # sqrt(pi_k) * p_k * e^t dh_k / h_k
        curvature = np.zeros(shape + (2, 2), dtype=complex)  # sum_k pi_k p_k e^{2t} ddh_k / h_k
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            for term, (lh, ah) in zip(self.terms, parts):
                p = term.power
                sqrt_pi.append(np.exp(p * lh - 0.5 * lse))

                vk = np.zeros(shape + (2,), dtype=complex)
                base = _times_log(p - 1.0, lh) - 0.5 * lse
                for j, dpoly in enumerate(term.first):
                    ld, ad = dpoly.log_eval(log_abs, arg, t)
                    vk[..., j] = p * np.exp(base + ld + t + 1j * (ad - ah))
                v.append(vk)

                base2 = np.log(p) + _times_log(2.0 * p - 1.0, lh) - lse
                for j in range(2):
                    for k in range(2):
                        ldd, add = term.second[j][k].log_eval(log_abs, arg, t)
                        curvature[..., j, k] += np.exp(base2 + ldd + 2.0 * t + 1j * (add - ah))

        grad = sum(s[..., None] * vk for s, vk in zip(sqrt_pi, v))

        pairs = []
        for a in range(len(self.terms)):
            for b in range(a + 1, len(self.terms)):
                pairs.append(sqrt_pi[b][..., None] * v[a] - sqrt_pi[a][..., None] * v[b])

        mixed = np.zeros(shape + (2, 2), dtype=complex)
        holo = curvature.copy()
        for a, vk in enumerate(v):
            holo -= _outer(vk, vk) / self.terms[a].power
        for e in pairs:
            mixed += _outer(e, np.conj(e))
            holo += _outer(e, e)

        det = np.zeros(shape)
        for a in range(len(pairs)):
            for b in range(a + 1, len(pairs)):
                det += np.abs(_cross(pairs[a], pairs[b])) ** 2

        c = self.coef
        return Jet(
            value=c * lse if c != 0 else np.zeros(shape),
            grad=c * grad,
            hess_mixed=c * mixed,
            hess_holo=c * holo,
            det_mixed=c * c * det,
        )

    # ------------------------------------------------------------ structure

    @property
    def is_s1_invariant(self) -> bool:
        return all(term.poly.is_homogeneous for term in self.terms)

    @property
    def is_toric(self) -> bool:
        return all(term.poly.is_monomial for term in self.terms)

    def compose(self, transform: Callable[[Polynomial], Polynomial]) -> "LogSumForm":
        """The same log-sum with every h_k replaced by transform(h_k)."""
        return LogSumForm(self.coef, tuple(LogSumTerm(transform(term.poly), term.power)
                                           for term in self.terms))


# ============================================================================
# Finite-difference Engine
# ============================================================================

_REAL_AXES = np.array([[1, 0], [1j, 0], [0, 1], [0, 1j]], dtype=complex)  # x1, y1, x2, y2


def finite_difference_jet(u: Callable[[np.ndarray, np.ndarray], np.ndarray],
                          z: np.ndarray, t: float = 0.0,
                          step_rel: float = FD_STEP_HESSIAN_REL) -> Jet:
    """
    Jet of a real function of (z1, z2) by central differences in the four real coordinates.

    Args:
        u: Vectorized u(z1, z2)
        z: (N, 2) unscaled points
        t: Log-scale applied to the returned derivatives (see module docstring)
        step_rel: Step relative to |z|

    Returns:
        Jet at z; Wirtinger derivatives u_{j kbar} = (u_xx + u_yy + i(u_xjyk - u_yjxk)) / 4
    """
    z = np.asarray(z, dtype=complex)
    h = step_rel * np.linalg.norm(z, axis=-1)
    hz = h[..., None]

    def at(offset) -> np.ndarray:
        q = z + offset
        return np.asarray(u(q[..., 0], q[..., 1]), dtype=float)

    u0 = at(0.0)
    plus = [at(hz * axis) for axis in _REAL_AXES]
    minus = [at(-hz * axis) for axis in _REAL_AXES]

    first = np.stack([(plus[a] - minus[a]) / (2.0 * h) for a in range(4)], axis=-1)
    second = np.zeros(z.shape[:-1] + (4, 4))
    for a in range(4):
        second[..., a, a] = (plus[a] - 2.0 * u0 + minus[a]) / h ** 2
        for b in range(a + 1, 4):
            ea, eb = hz * _REAL_AXES[a], hz * _REAL_AXES[b]
            mixed = (at(ea + eb) - at(ea - eb) - at(-ea + eb) + at(-ea - eb)) / (4.0 * h ** 2)
            second[..., a, b] = second[..., b, a] = mixed

    grad = 0.5 * (first[..., 0::2] - 1j * first[..., 1::2])
    mixed = np.zeros(z.shape[:-1] + (2, 2), dtype=complex)
    holo = np.zeros_like(mixed)
    for j in range(2):
        for k in range(2):
            xx = second[..., 2 * j, 2 * k]
            yy = second[..., 2 * j + 1, 2 * k + 1]
            xy = second[..., 2 * j, 2 * k + 1]
            yx = second[..., 2 * j + 1, 2 * k]
            mixed[..., j, k] = 0.25 * (xx + yy + 1j * (xy - yx))
            holo[..., j, k] = 0.25 * (xx - yy - 1j * (xy + yx))

    scale = np.exp(t)
    mixed *= scale ** 2
    det = np.real(mixed[..., 0, 0] * mixed[..., 1, 1] - mixed[..., 0, 1] * mixed[..., 1, 0])
    return Jet(value=u0, grad=grad * scale, hess_mixed=mixed, hess_holo=holo * scale ** 2,
               det_mixed=det)


def five_point(values: Sequence[np.ndarray], h: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    First and second derivatives from samples at x-2h, x-h, x, x+h, x+2h.

    Examples:
        >>> five_point([4.0, 1.0, 0.0, 1.0, 4.0], 1.0)
        (0.0, 2.0)
    """
    m2, m1, c, p1, p2 = values
    d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
    d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h ** 2)
    return d1, d2
