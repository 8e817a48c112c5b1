"""
Convolution Module - Convolution operators and the local Thom-Sebastiani formula.
Diagonal classes are torus families whose structure maps are monomials;
the operator Psi splits off the antidiagonal locus by Smith reduction and
recurses, and the Thom-Sebastiani terms of h(f, g) = g^N + sum f^m_i are
assembled from Kummer torsors, monomial torsors and Psi values.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import sympy
from sympy.core.intfunc import igcdex

from groth_core import (
    GrothElem,
    UnsupportedInputError,
    face_hypersurface,
    kummer,
    monomial_torsor,
    theta,
    xi,
)
from milnor_calc import motivic_fiber_b
from newton_engine import LaurentPoly, NewtonError, tropical_h

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class DiagClass:
    """
    base * [(G_m^n, pi)] with pi_i(z) = z^exponents[i].

    Attributes:
        base: GrothElem multiplier (number of components, extra factors)
        exponents: One exponent vector in Z^n per structure-map component
        vals: Valuations of the torus coordinates; pi_i sits at level exponents[i] . vals
        theta: Diagonal profile theta_1 = theta_2 < ... < theta_l in (0, 1]
    """

    base: GrothElem
    exponents: Tuple[Vector, ...]
    vals: Tuple[Fraction, ...]
    theta: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(tuple(int(c) for c in e) for e in self.exponents))
        object.__setattr__(self, "vals", tuple(Fraction(v) for v in self.vals))
        object.__setattr__(self, "theta", tuple(Fraction(t) for t in self.theta))
        n = len(self.vals)
        if any(len(e) != n for e in self.exponents):
            raise UnsupportedInputError("exponent vectors and valuations disagree on dimension")
        if len(self.theta) != len(self.exponents) or not self.theta:
            raise UnsupportedInputError("one theta entry per structure-map component required")
        if any(t <= 0 or t > 1 for t in self.theta):
            raise UnsupportedInputError("theta entries must lie in (0, 1]")
        if len(self.theta) > 1:
            if self.theta[0] != self.theta[1] or any(
                    a >= b for a, b in zip(self.theta[1:], self.theta[2:])):
                raise UnsupportedInputError(f"theta {self.theta} is not of the form t1 = t2 < ... ")
        levels = self.levels
        if any(level <= 0 for level in levels):
            raise UnsupportedInputError("structure-map components need positive levels")
        for level, t in zip(levels, self.theta):
            if level * self.theta[-1] != levels[-1] * t:
                raise UnsupportedInputError("levels are not proportional to theta")

    @property
    def length(self) -> int:
        return len(self.exponents)

    @property
    def levels(self) -> Tuple[Fraction, ...]:
        return tuple(sum((c * v for c, v in zip(e, self.vals)), Fraction(0)) for e in self.exponents)

    @property
    def pi_weights(self) -> Tuple[int, ...]:
        """Weights of the good G_m-action on the components, c.pi_i = c^w_i pi_i."""
        order = math.lcm(*(v.denominator for v in self.vals))
        return tuple(int(level * order) for level in self.levels)

    def to_dict(self) -> Dict:
        return {
            "base": self.base.to_dict(), "exponents": [list(e) for e in self.exponents],
            "vals": [str(v) for v in self.vals], "theta": [str(t) for t in self.theta],
            "pi_weights": list(self.pi_weights),
        }


def _single_monomial(f: LaurentPoly, what: str) -> Tuple[int, int]:
    if f.is_zero():
        raise NewtonError(f"{what} is the zero polynomial")
    if len(f.terms) != 1:
        raise UnsupportedInputError(f"{what} = {f} is not a monomial")
    (i, j), _ = f.terms[0]
    if (i == 0) == (j == 0):
        raise UnsupportedInputError(f"{what} = {f} must be a power of a single variable")
    return i, j


def _monomial_family(f: LaurentPoly, what: str) -> DiagClass:
    """The one-component family z -> z^a of a pure power of one variable."""
    i, j = _single_monomial(f, what)
    a = i + j
    return DiagClass(GrothElem.one(), ((a,),), (Fraction(1, a),), (Fraction(1),))


def unit_class() -> DiagClass:
    """The identity family z -> z at level one."""
    return DiagClass(GrothElem.one(), ((1,),), (Fraction(1),), (Fraction(1),))


def _base_case(e: DiagClass) -> GrothElem:
    """Psi_2 = -(dot - ddot) on a two-variable family."""
    (e1, e2) = e.exponents
    if len(e.vals) != 2 or e1[0] * e2[1] - e1[1] * e2[0] == 0:
        raise UnsupportedInputError(
            f"unsupported convolution atom: components {e1}, {e2} do not span a torus")
    level = e.levels[0]
    vals = tuple(v / level for v in e.vals)
    dot = face_hypersurface({e1: 1, e2: 1}, "C", 1, vals)
    ddot = monomial_torsor([[a - b for a, b in zip(e1, e2)]], [0], "C", [-1])
    return -(dot - ddot)


def _antidiagonal_step(e: DiagClass) -> DiagClass:
    """
    G_m x {pi_1 + pi_2 = 0} with structure map (w, pi_3, ..., pi_l).

    The antidiagonal {z^D = -1} splits into gcd(D) cosets of a one-dimensional
    torus u_2; w is a fresh coordinate at the level of pi_3.
    """
    if len(e.vals) != 2:
        raise UnsupportedInputError("unsupported convolution atom: only two-variable families reduce")
    diff = [a - b for a, b in zip(e.exponents[0], e.exponents[1])]
    d = math.gcd(*diff)
    if d == 0:
        raise UnsupportedInputError("unsupported convolution atom: pi_1 and pi_2 coincide")
    p1, p2 = diff[0] // d, diff[1] // d
    x0, y0, _ = igcdex(p1, p2)
    x0, y0 = int(x0), int(y0)
    # z = u^A with A = [[x0, -p2], [y0, p1]] sends z^D to u_1^d.
    tail = [-c[0] * p2 + c[1] * p1 for c in e.exponents[2:]]
    v_u2 = -y0 * e.vals[0] + x0 * e.vals[1]
    if all(c < 0 for c in tail):
        tail, v_u2 = [-c for c in tail], -v_u2
    exponents = ((1, 0),) + tuple((0, c) for c in tail)
    vals = (e.levels[2], v_u2)
    theta = (e.theta[2],) + e.theta[2:]
    return DiagClass(e.base * d, exponents, vals, theta)


def psi(e: DiagClass) -> GrothElem:
    """
    Convolution operator Psi_theta into classes over G_m.

    Args:
        e: Diagonal class of length >= 2

    Returns:
        GrothElem
    """
    if e.base.is_zero():
        return GrothElem.zero()
    if e.length < 2:
        raise UnsupportedInputError("psi needs at least two structure-map components")
    while e.length > 2:
        e = _antidiagonal_step(e)
        logger.debug("psi: reduced to theta=%s, base=%s", e.theta, e.base)
    return e.base * _base_case(e)


def convolve(first: DiagClass, second: DiagClass) -> GrothElem:
    """Psi_2 of the product family of two one-component classes."""
    if first.length != 1 or second.length != 1:
        raise UnsupportedInputError("convolve takes one-component classes")
    n1, n2 = len(first.vals), len(second.vals)
    exponents = (first.exponents[0] + (0,) * n2, (0,) * n1 + second.exponents[0])
    scale = first.levels[0] / second.levels[0]
    vals = first.vals + tuple(v * scale for v in second.vals)
    product = DiagClass(first.base * second.base, exponents, vals, (Fraction(1), Fraction(1)))
    return psi(product)


def _family_fiber(e: DiagClass) -> GrothElem:
    """The fiber over rv(t) of a one-variable power family."""
    (a,), = e.exponents
    return e.base * kummer(a, "C")


def ts_two(f: LaurentPoly, g: LaurentPoly) -> GrothElem:
    """
    Separate-variable formula S(f + g) = S(f) + S(g) - S(f) * S(g).

    Args:
        f: Power of one variable
        g: Power of the other variable

    Returns:
        Equivariant class (theta applied)
    """
    fi, fj = _single_monomial(f, "f")
    gi, gj = _single_monomial(g, "g")
    if (fi and gi) or (fj and gj):
        raise UnsupportedInputError("f and g share a variable")
    first, second = _monomial_family(f, "f"), _monomial_family(g, "g")
    total = _family_fiber(first) + _family_fiber(second) - convolve(first, second)
    return theta(total)


@dataclass(frozen=True)
class TSTerm:
    """One labelled summand of the assembled formula."""

    label: str
    value: GrothElem

    def to_dict(self) -> Dict:
        return {"label": self.label, "value": self.value.to_dict(), "text": self.value.describe()}


def _ts_degrees(f: LaurentPoly, g: LaurentPoly) -> Tuple[int, int]:
    fi, fj = _single_monomial(f, "f")
    gi, gj = _single_monomial(g, "g")
    if (fi and gi) or (fj and gj):
        raise UnsupportedInputError(f"unsupported (f, g) pair ({f}, {g}): shared variable")
    return fi + fj, gi + gj


def ts_terms(f: LaurentPoly, g: LaurentPoly, N: int, m_list: Sequence[int]) -> List[TSTerm]:
    """
    The summands of the Thom-Sebastiani formula for h = g^N + sum f^m_i.

    Pieces: the two rays of the tropical curve (Milnor fibers of g^N along
    {f = 0} and of f^m_2), one torsor term per point (alpha_i, beta_i) with
    i > 2, and one convolution term per i >= 2.
    """
    a, b = _ts_degrees(f, g)
    trop = tropical_h(N, m_list)
    m_list = trop.m_list
    m2 = m_list[0]
    terms = [
        TSTerm("S_g^N([Z_f])", kummer(b * N, "C")),
        TSTerm(f"S_f^{m2}", kummer(a * m2, "C")),
    ]
    for m in m_list[1:]:
        # f^m at level one on the leading locus {g^N = -f^m2}.
        value = monomial_torsor([[a * m, 0], [-a * m2, b * N]], [1, 0], "C", [1, -1])
        terms.append(TSTerm(f"S_f^{m}([Z_g^N+f_({m})])", value))
    for index, m in enumerate(m_list):
        chosen = m_list[:index + 1]
        vals = (Fraction(1, a * m), Fraction(m2, b * N * m))
        exponents = ((0, b * N),) + tuple((a * mi, 0) for mi in chosen)
        theta_profile = (Fraction(m2, m),) + tuple(Fraction(mi, m) for mi in chosen)
        diag = DiagClass(GrothElem.one(), exponents, vals, theta_profile)
        terms.append(TSTerm(f"-Psi_theta({index + 2})", -psi(diag)))
    return terms


def ts_assemble(f: LaurentPoly, g: LaurentPoly, N: int, m_list: Sequence[int]) -> GrothElem:
    """
    Assembled Thom-Sebastiani class of h(f, g), theta applied.

    Args:
        f: Power of one variable
        g: Power of the other variable
        N: Exponent of g
        m_list: [m_2, ..., m_l], strictly increasing

    Returns:
        GrothElem
    """
    total = GrothElem.zero()
    for term in ts_terms(f, g, N, m_list):
        total = total + term.value
    return theta(total)


def ts_real(f: LaurentPoly, g: LaurentPoly, N: int, m_list: Sequence[int]) -> GrothElem:
    """Real specialization: xi applied term by term."""
    total = GrothElem.zero()
    for term in ts_terms(f, g, N, m_list):
        total = total + xi(theta(term.value))
    return total


def ts_polynomial(f: LaurentPoly, g: LaurentPoly, N: int, m_list: Sequence[int]) -> LaurentPoly:
    """h(f, g) = g^N + sum f^m_i."""
    h = g ** N
    for m in m_list:
        h = h + f ** m
    return h


def ts_direct(f: LaurentPoly, g: LaurentPoly, N: int, m_list: Sequence[int]) -> GrothElem:
    """The motivic Milnor fiber of h(f, g) from its own Newton polygon."""
    _ts_degrees(f, g)
    tropical_h(N, m_list)
    return motivic_fiber_b(ts_polynomial(f, g, N, m_list), "C")
