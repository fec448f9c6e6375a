"""
Polynomials in two complex variables for pshlab
Sparse monomial dictionaries with parsing, derivatives, homogeneous parts,
linear substitutions and overflow-free evaluation in log-magnitude form.
"""

import re
from fractions import Fraction
import math
from typing import Dict, Iterator, List, Tuple

import numpy as np

from src.constants import COEFF_SNAP_TOL
from src.errors import CatalogParseError

Exponent = Tuple[int, int]

_TERM_RE = re.compile(
    r"""^(?P<coef>(\d+(\.\d*)?|\.\d+)(/\d+)?)?   # optional numeric coefficient
        (?P<rest>(\*?z[12](\^\d+)?)*)$""",
    re.VERBOSE,
)
_FACTOR_RE = re.compile(r"z([12])(?:\^(\d+))?")


class Polynomial:
    """
    A polynomial sum c_(i,j) z1^i z2^j with complex coefficients.

    Example:
        >>> p = Polynomial.parse("z2^5-z1^5")
        >>> p.degree, p.min_degree
        (5, 5)
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Exponent, complex] = None):
        cleaned = {}
        for exponent, coef in (terms or {}).items():
            if coef != 0:
                cleaned[(int(exponent[0]), int(exponent[1]))] = complex(coef)
        self.terms = cleaned

    # ------------------------------------------------------------------ parsing

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """
        Parse expressions such as 'z2-z1', '2*z1*z2+z2^3' or '1/2*z1^2-z2'.

        Raises:
            CatalogParseError: On any malformed term
        """
        source = (text or "").replace(" ", "")
        if not source:
            raise CatalogParseError(f"❌ Empty polynomial {text!r}")
        if source[0] not in "+-":
            source = "+" + source

        terms: Dict[Exponent, complex] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", source):
            match = _TERM_RE.match(body)
            if not match or body.startswith("*"):
                raise CatalogParseError(f"❌ Cannot parse term {body!r} in {text!r}")
            coef_text = match.group("coef")
            rest = match.group("rest") or ""
            if coef_text is None and not rest:
                raise CatalogParseError(f"❌ Cannot parse term {body!r} in {text!r}")
            if coef_text and rest and not rest.startswith("*"):
                raise CatalogParseError(f"❌ Missing '*' after coefficient in {body!r}")
            try:
                coef = float(Fraction(coef_text)) if coef_text else 1.0
            except (ValueError, ZeroDivisionError):
                raise CatalogParseError(f"❌ Bad coefficient {coef_text!r} in {text!r}")
            i = j = 0
            for var, power in _FACTOR_RE.findall(rest):
                n = int(power) if power else 1
                if var == "1":
                    i += n
                else:
                    j += n
            value = -coef if sign == "-" else coef
            terms[(i, j)] = terms.get((i, j), 0.0) + value
        return cls(terms)

    @classmethod
    def monomial(cls, i: int, j: int, coef: complex = 1.0) -> "Polynomial":
        return cls({(i, j): coef})

    # -------------------------------------------------------------- structure

    def __iter__(self) -> Iterator[Tuple[Exponent, complex]]:
        return iter(sorted(self.terms.items()))

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: List[str] = []
        for (i, j), coef in sorted(self.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), kv[0])):
            factors = []
            if i:
                factors.append("z1" if i == 1 else f"z1^{i}")
            if j:
                factors.append("z2" if j == 1 else f"z2^{j}")
            c = coef.real if coef.imag == 0 else coef
            if factors and c == 1:
                parts.append("+" + "*".join(factors))
            elif factors and c == -1:
                parts.append("-" + "*".join(factors))
            else:
                text = f"{c:g}" if isinstance(c, float) else f"({c})"
                if not text.startswith("-"):
                    text = "+" + text
                parts.append(text + ("*" + "*".join(factors) if factors else ""))
        return "".join(parts).lstrip("+")

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=0)

    @property
    def min_degree(self) -> int:
        return min((i + j for i, j in self.terms), default=0)

    @property
    def is_homogeneous(self) -> bool:
        return self.degree == self.min_degree

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial({e: c for e, c in self.terms.items() if e[0] + e[1] == d})

    def leading_form(self) -> "Polynomial":
        """Lowest-degree homogeneous part (the tangent cone at the origin)."""
        return self.homogeneous_part(self.min_degree)

    # ------------------------------------------------------------- arithmetic

    def __add__(self, other: "Polynomial") -> "Polynomial":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(terms)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scaled(-1.0)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        terms: Dict[Exponent, complex] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return Polynomial(terms)

    def __pow__(self, n: int) -> "Polynomial":
        result = Polynomial({(0, 0): 1.0})
        for _ in range(int(n)):
            result = result * self
        return result

    def scaled(self, factor: complex) -> "Polynomial":
        return Polynomial({e: c * factor for e, c in self.terms.items()})

    def derivative(self, var: int) -> "Polynomial":
        """Holomorphic partial derivative in z1 (var=0) or z2 (var=1)."""
        terms: Dict[Exponent, complex] = {}
        for (i, j), c in self.terms.items():
            power = i if var == 0 else j
            if power == 0:
                continue
            key = (i - 1, j) if var == 0 else (i, j - 1)
            terms[key] = terms.get(key, 0) + c * power
        return Polynomial(terms)

    def substitute(self, p1: "Polynomial", p2: "Polynomial") -> "Polynomial":
        """The composition P(p1(z), p2(z))."""
        result = Polynomial()
        cache1: Dict[int, Polynomial] = {}
        cache2: Dict[int, Polynomial] = {}
        for (i, j), c in self.terms.items():
            a = cache1.setdefault(i, p1 ** i)
            b = cache2.setdefault(j, p2 ** j)
            result = result + (a * b).scaled(c)
        return result

    def compose_linear(self, U: np.ndarray) -> "Polynomial":
        """
        The polynomial w -> P(U w) for a 2x2 matrix U, with cancellation residue removed.

        Note:
            Within each homogeneous degree, coefficients below COEFF_SNAP_TOL times
            the largest one are set to zero, so roots of leading forms stay exact roots.
        """
        lin1 = Polynomial({(1, 0): U[0, 0], (0, 1): U[0, 1]})
        lin2 = Polynomial({(1, 0): U[1, 0], (0, 1): U[1, 1]})
        # Binomial expansion keeps the work linear in the number of monomials
        terms: Dict[Exponent, complex] = {}
        for (i, j), c in self.terms.items():
            a = lin1 ** i
            b = lin2 ** j
            for (i1, j1), c1 in a.terms.items():
                for (i2, j2), c2 in b.terms.items():
                    key = (i1 + i2, j1 + j2)
                    terms[key] = terms.get(key, 0) + c * c1 * c2
        return Polynomial(terms).snapped()

    def snapped(self, rel_tol: float = COEFF_SNAP_TOL) -> "Polynomial":
        kept: Dict[Exponent, complex] = {}
        for d in sorted({i + j for i, j in self.terms}):
            part = {e: c for e, c in self.terms.items() if e[0] + e[1] == d}
            scale = max(abs(c) for c in part.values())
            kept.update({e: c for e, c in part.items() if abs(c) > rel_tol * scale})
        return Polynomial(kept)

    def binomial_shift_z2(self, p: "Polynomial", a: complex = 1.0) -> "Polynomial":
        """The polynomial P(z1, (z2 - p(z1)) / a) used by graph straightening."""
        inner = (Polynomial.monomial(0, 1) - p).scaled(1.0 / a)
        return self.substitute(Polynomial.monomial(1, 0), inner)

    def coefficient_norm(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    # ------------------------------------------------------------- evaluation

    def __call__(self, z1, z2):
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        out = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
        for (i, j), c in self.terms.items():
            out = out + c * z1 ** i * z2 ** j
        return out

    def log_eval(self, log_abs: np.ndarray, arg: np.ndarray, t: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """
        log|P(e^t z)| and arg P(e^t z) from log|z_j| and arg z_j.

        Args:
            log_abs: Array (..., 2) of log|z1|, log|z2| (-inf for exact zeros)
            arg: Array (..., 2) of arg z1, arg z2
            t: Log-scale applied to z

        Returns:
            Tuple (log_magnitude, phase); log_magnitude is -inf where P vanishes exactly
        """
        shape = log_abs.shape[:-1]
        if not self.terms:
            return np.full(shape, -np.inf), np.zeros(shape)

        logs = []
        phases = []
        for (i, j), c in self.terms.items():
            lm = np.full(shape, np.log(abs(c)) + (i + j) * t)
            ph = np.full(shape, np.angle(c))
            if i:
                lm = lm + i * log_abs[..., 0]
                ph = ph + i * arg[..., 0]
            if j:
                lm = lm + j * log_abs[..., 1]
                ph = ph + j * arg[..., 1]
            logs.append(lm)
            phases.append(ph)

        logs = np.stack(logs)
        phases = np.stack(phases)
        top = np.max(logs, axis=0)
        safe_top = np.where(np.isfinite(top), top, 0.0)
        with np.errstate(invalid="ignore", over="ignore"):
            total = np.sum(np.exp(logs - safe_top) * np.exp(1j * phases), axis=0)
        with np.errstate(divide="ignore"):
            magnitude = safe_top + np.log(np.abs(total))
        magnitude = np.where(np.isfinite(top), magnitude, -np.inf)
        return magnitude, np.angle(total)


def homogeneous_roots(form: Polynomial) -> List[np.ndarray]:
    """
    Zeros on CP^1 of a homogeneous form, as unit vectors (v1, v2).

    Note:
        Roots are taken in zeta = z1/z2; the degree drop of the dehomogenized
        polynomial gives the root at zeta = infinity.
    """
    d = form.degree
    coeffs = [form.terms.get((i, d - i), 0) for i in range(d, -1, -1)]  # zeta^d ... zeta^0
    vectors: List[np.ndarray] = []
    leading = 0
    while leading < len(coeffs) and coeffs[leading] == 0:
        leading += 1
    if leading > 0:
        vectors.append(np.array([1.0 + 0j, 0.0 + 0j]))
    trimmed = np.array(coeffs[leading:], dtype=complex)
    if trimmed.size > 1:
        for zeta in np.roots(trimmed):
            norm = np.sqrt(1.0 + abs(zeta) ** 2)
            vectors.append(np.array([zeta / norm, 1.0 / norm], dtype=complex))
    return vectors


def vanishing_order(p: Polynomial, v: np.ndarray, tol: float) -> float:
    """Order of vanishing of t -> P(t v) at t = 0 for a unit vector v (inf if P vanishes on the line)."""
    for d in range(p.min_degree, p.degree + 1):
        part = p.homogeneous_part(d)
        if part.is_zero:
            continue
        value = complex(part(v[0], v[1]))
        if abs(value) > tol * part.coefficient_norm():
            return d
    return math.inf

