"""
Zeta Engine Module - Motivic zeta functions as exact rational functions in T.
A ZetaRat is a sum of terms c * [A]^a0 * T^b0 * prod G(a, b) with
G(a, b) = [A]^a T^b / (1 - [A]^a T^b); coefficients, the formal limit at
T -> oo, Hadamard products and Euler realizations are computed on that form.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

import sympy
from sympy.ntheory.modular import crt

from config import HM_MAX_POINTS, ZETA_CHECK_ORDER
from gamma_calc import MotivicError
from groth_core import GrothElem, TensorElem, eta, gm, hm, theta
from milnor_calc import milnor_integral
from newton_engine import LaurentPoly
from realize_maps import realize_complex, realize_real

logger = logging.getLogger(__name__)

T = sympy.Symbol("T")

Atom = Tuple[int, int]


class ZetaError(MotivicError):
    """Custom exception for undefined limits and unsupported zeta shapes."""
    pass


@dataclass(frozen=True)
class ZetaTerm:
    """coeff * [A]^a0 * T^b0 * prod over atoms of G(a, b)."""

    coeff: GrothElem
    a0: int
    b0: int
    atoms: Tuple[Atom, ...] = ()

    def shape(self) -> Tuple:
        return (self.a0, self.b0, self.atoms)

    def to_dict(self) -> Dict:
        return {"coeff": self.coeff.to_dict(), "A": self.a0, "T": self.b0,
                "atoms": [list(atom) for atom in self.atoms]}

    def __str__(self) -> str:
        factors = [f"({self.coeff})"]
        if self.a0:
            factors.append(f"[A]^{self.a0}")
        if self.b0:
            factors.append(f"T^{self.b0}")
        factors += [f"G({a},{b})" for a, b in self.atoms]
        return "*".join(factors)


class ZetaRat:
    """A rational function in T in geometric-atom form; like shapes are merged."""

    def __init__(self, terms=()):
        merged: Dict[Tuple, GrothElem] = {}
        for term in terms:
            atoms = tuple(sorted(term.atoms))
            for a, b in atoms:
                if b <= 0:
                    raise ZetaError(f"atom G({a},{b}) needs a positive T-exponent")
            key = (term.a0, term.b0, atoms)
            merged[key] = merged.get(key, GrothElem.zero()) + term.coeff
        self.terms: Tuple[ZetaTerm, ...] = tuple(
            ZetaTerm(coeff, a0, b0, atoms)
            for (a0, b0, atoms), coeff in sorted(merged.items(), key=lambda item: item[0])
            if not coeff.is_zero()
        )

    def __add__(self, other: "ZetaRat") -> "ZetaRat":
        return ZetaRat(self.terms + other.terms)

    def __neg__(self) -> "ZetaRat":
        return ZetaRat(ZetaTerm(-t.coeff, t.a0, t.b0, t.atoms) for t in self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, ZetaRat) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def map_coefficients(self, func) -> "ZetaRat":
        return ZetaRat(ZetaTerm(func(t.coeff), t.a0, t.b0, t.atoms) for t in self.terms)

    def to_dict(self) -> Dict:
        return {"kind": "ZetaRat", "terms": [t.to_dict() for t in self.terms]}

    @classmethod
    def from_dict(cls, data: Dict) -> "ZetaRat":
        if data.get("kind") != "ZetaRat":
            raise ZetaError("not a ZetaRat payload")
        return cls(
            ZetaTerm(GrothElem.from_dict(t["coeff"]), int(t["A"]), int(t["T"]),
                     tuple((int(a), int(b)) for a, b in t["atoms"]))
            for t in data["terms"]
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(t) for t in self.terms)


def _integral(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise ZetaError(f"{what} {value} is not an integer; sigma violates integrality")
    return int(value)


def _primitive_ray(slope: Fraction) -> Tuple[int, int]:
    """The primitive lattice vector (q, p) along (1, p/q)."""
    return slope.denominator, slope.numerator


def _open_cone_points(v1: Tuple[int, int], v2: Tuple[int, int]) -> List[Tuple[int, int]]:
    """Lattice points a*v1 + b*v2 with 0 < a, b <= 1."""
    det = v1[0] * v2[1] - v1[1] * v2[0]
    if det == 0:
        raise ZetaError("degenerate cone")
    points = []
    k_values = [0, v1[1], v2[1], v1[1] + v2[1]]
    for j in range(1, v1[0] + v2[0] + 1):
        for k in range(min(k_values), max(k_values) + 1):
            a = Fraction(j * v2[1] - k * v2[0], det)
            b = Fraction(v1[0] * k - v1[1] * j, det)
            if 0 < a <= 1 and 0 < b <= 1:
                points.append((j, k))
    return points


def _summand_terms(summand, weight: GrothElem) -> List[ZetaTerm]:
    period = summand.period
    if summand.l == 0:
        c = summand.sigma.const
        step = _integral(period * c, "[A]-exponent per period")
        return [ZetaTerm(weight, 0, 0, ((-step, period),))]
    if summand.l != 1:
        raise ZetaError("higher-dimensional Gamma-parts are unsupported")
    const = summand.sigma.const
    slope = summand.sigma.slopes[0]
    terms = []
    for cell in summand.gamma.cells:
        lo, hi = cell.interval_bounds()
        if lo is None or hi is None:
            raise ZetaError("unbounded Gamma-part; call bounded() first")
        if lo == hi:
            p = math.lcm(period, lo.denominator)
            step = _integral(p * (const + slope * lo), "[A]-exponent per period")
            terms.append(ZetaTerm(weight, 0, 0, ((-step, p),)))
            continue
        # Lattice points (j, k) with m = period * j and nu = k / m.
        per_j = _integral(period * const, "[A]-exponent per period")

        def image(point):
            j, k = point
            return (-per_j * j - slope * k, period * j)

        v1 = _primitive_ray(period * lo)
        v2 = _primitive_ray(period * hi)
        atoms = (image(v1), image(v2))
        for point in _open_cone_points(v1, v2):
            shifted = (point[0] - v1[0] - v2[0], point[1] - v1[1] - v2[1])
            a0, b0 = image(shifted)
            terms.append(ZetaTerm(weight, a0, b0, atoms))
    return terms


def zeta_from_tensor(t: TensorElem) -> ZetaRat:
    """
    Closed form of sum over m of eta(h_m(t)) T^m.

    Points give one geometric atom on the multiples of their period; open
    intervals give a two-dimensional cone summed over its fundamental
    parallelepiped.
    """
    terms = []
    for summand in t.bounded():
        weight = summand.res * gm() ** summand.l
        terms += _summand_terms(summand, weight)
    return ZetaRat(terms)


def _term_coefficients(term: ZetaTerm, order: int) -> Dict[int, GrothElem]:
    """Coefficients of T^m, m <= order, of one term."""
    series = {term.b0: {term.a0: 1}}
    for a, b in term.atoms:
        nxt: Dict[int, Dict[int, int]] = {}
        for m, by_a in series.items():
            n = 1
            while m + n * b <= order:
                slot = nxt.setdefault(m + n * b, {})
                for a_exp, count in by_a.items():
                    slot[a_exp + n * a] = slot.get(a_exp + n * a, 0) + count
                n += 1
        series = nxt
    out = {}
    for m, by_a in series.items():
        if m > order:
            continue
        total = GrothElem.zero()
        for a_exp, count in by_a.items():
            total = total + term.coeff.shift_A(a_exp) * count
        out[m] = total
    return out


def coeff(z: ZetaRat, m: int) -> GrothElem:
    """Exact coefficient of T^m."""
    total = GrothElem.zero()
    for term in z.terms:
        total = total + _term_coefficients(term, m).get(m, GrothElem.zero())
    return total


def hm_series(t: TensorElem, order: int = ZETA_CHECK_ORDER) -> Dict[int, GrothElem]:
    """eta(h_m(t)) for m = 1..order by direct lattice enumeration."""
    bounded = t.bounded()
    return {m: eta(hm(bounded, m, HM_MAX_POINTS)) for m in range(1, order + 1)}


def limit_T_inf(z: ZetaRat) -> GrothElem:
    """
    Formal limit T -> oo: each atom tends to -1, prefactors with b0 < 0 to 0.
    """
    total = GrothElem.zero()
    for term in z.terms:
        if term.b0 > 0:
            raise ZetaError(f"limit undefined: term {term} grows like T^{term.b0}")
        if term.b0 < 0:
            continue
        sign = (-1) ** len(term.atoms)
        total = total + term.coeff.shift_A(term.a0) * sign
    return total


def _single_atom_hadamard(t1: ZetaTerm, t2: ZetaTerm) -> List[ZetaTerm]:
    (alpha1, beta1), = t1.atoms
    (alpha2, beta2), = t2.atoms
    lcm = math.lcm(beta1, beta2)
    solution = crt([beta1, beta2], [t1.b0 % beta1, t2.b0 % beta2])
    if solution is None:
        return []
    residue = int(solution[0])
    start = max(t1.b0 + beta1, t2.b0 + beta2)
    first = start + (residue - start) % lcm

    def a_exponent(m: int) -> int:
        return (t1.a0 + alpha1 * (m - t1.b0) // beta1 + t2.a0 + alpha2 * (m - t2.b0) // beta2)

    step = alpha1 * (lcm // beta1) + alpha2 * (lcm // beta2)
    return [ZetaTerm(t1.coeff * t2.coeff, a_exponent(first) - step, first - lcm, ((step, lcm),))]


def _bare_hadamard(bare: ZetaTerm, other: ZetaTerm) -> List[ZetaTerm]:
    value = _term_coefficients(other, bare.b0).get(bare.b0)
    if value is None or value.is_zero():
        return []
    product_coeff = bare.coeff.shift_A(bare.a0) * value
    return [ZetaTerm(product_coeff, 0, bare.b0, ())]


def hadamard(z1: ZetaRat, z2: ZetaRat) -> ZetaRat:
    """
    Coefficientwise product, in closed form for terms with at most one atom.

    The result is checked against truncated products up to ZETA_CHECK_ORDER.
    """
    terms = []
    for t1 in z1.terms:
        for t2 in z2.terms:
            if not t1.atoms:
                terms += _bare_hadamard(t1, t2)
            elif not t2.atoms:
                terms += _bare_hadamard(t2, t1)
            elif len(t1.atoms) == 1 and len(t2.atoms) == 1:
                terms += _single_atom_hadamard(t1, t2)
            else:
                raise ZetaError("hadamard supports terms with at most one atom")
    result = ZetaRat(terms)
    for m in range(1, ZETA_CHECK_ORDER + 1):
        if coeff(result, m) != coeff(z1, m) * coeff(z2, m):
            raise ZetaError(f"closed-form Hadamard product disagrees at T^{m}")
    return result


def _realized(z: ZetaRat, a_value: int, realize) -> sympy.Expr:
    total = sympy.Integer(0)
    for term in z.terms:
        value = sympy.Integer(realize(term.coeff)) * sympy.Integer(a_value) ** term.a0 * T ** term.b0
        for a, b in term.atoms:
            monomial = sympy.Integer(a_value) ** a * T ** b
            value *= monomial / (1 - monomial)
        total += value
    return sympy.factor(sympy.cancel(total))


def realize_zeta(z: ZetaRat, realization: str = "chi_complex") -> sympy.Expr:
    """Euler realization of a zeta function as a rational function of T."""
    if realization == "chi_complex":
        return _realized(z, 1, realize_complex)
    if realization == "chi_real":
        return _realized(z, -1, realize_real)
    raise ZetaError(f"unknown realization {realization!r}")


def motivic_zeta(f: LaurentPoly, field_name: str = "C", sign: int = 1) -> ZetaRat:
    """Zeta function of the Milnor integral with equivariant (theta) coefficients."""
    return zeta_from_tensor(milnor_integral(f, field_name, sign)).map_coefficients(theta)


def topological_zeta(f: LaurentPoly, sign: int = 1) -> sympy.Expr:
    """Real Euler realization ([A] -> -1) of the real zeta function of f."""
    return realize_zeta(zeta_from_tensor(milnor_integral(f, "R", sign)), "chi_real")
