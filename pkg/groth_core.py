"""
Grothendieck Ring Module - Symbolic variety classes and RES (x) Gamma tensors.
Provides class atoms with group-action metadata, the ring of their integer
combinations localized at [A], tensor integrals, the retractions eb/eg, the
maps hm, eta, theta, xi, the relation elements P-1 and P_gamma, and the
Smith-normal-form calculus of monomial torsors.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy.matrices.normalforms import smith_normal_decomp

from gamma_calc import (
    GammaError,
    GammaSet,
    MotivicError,
    chi_b,
    chi_g,
    lattice_points,
    make_cell,
    make_interval,
    make_point,
    product,
)

logger = logging.getLogger(__name__)

FIELDS = ("C", "R")


class GrothError(MotivicError):
    """Custom exception for illegal Grothendieck-ring operations."""
    pass


class UnsupportedInputError(MotivicError):
    """Raised when an input lies outside the supported class algebra."""
    pass


def _check_field(field_name: str) -> str:
    if field_name not in FIELDS:
        raise GrothError(f"unknown field {field_name!r}, expected C or R")
    return field_name


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Action:
    """
    Group-action metadata attached by theta.

    kind is "mu" (mu_order acting with the given coordinate weights, complex
    classes), "swap" (mu_2 acting by x -> -x on coordinates whose flag is 1,
    real classes) or "trivial".
    """

    kind: str
    order: int = 1
    weights: Tuple[int, ...] = ()

    @classmethod
    def trivial(cls) -> "Action":
        return cls("trivial", 1, ())

    @property
    def is_trivial(self) -> bool:
        return self.kind == "trivial" or not any(self.weights)

    def key(self) -> Tuple:
        return (self.kind, self.order, self.weights)

    def to_dict(self) -> Dict:
        return {"kind": self.kind, "order": self.order, "weights": list(self.weights)}

    @classmethod
    def from_dict(cls, data: Dict) -> "Action":
        return cls(data["kind"], int(data["order"]), tuple(int(w) for w in data["weights"]))

    def __str__(self) -> str:
        if self.is_trivial:
            return "trivial"
        weights = ",".join(str(w) for w in self.weights)
        if self.kind == "swap":
            return f"swap({weights})"
        return f"mu{self.order}({weights})"


def _action_key(action: Optional[Action]) -> Tuple:
    return () if action is None else action.key()


def format_term(exponents: Tuple[int, int], coef: Fraction, first: bool) -> str:
    names = []
    for var, e in zip("xy", exponents):
        if e == 1:
            names.append(var)
        elif e:
            names.append(f"{var}^{e}")
    mono = "".join(names) or "1"
    sign = "-" if coef < 0 else ("" if first else "+")
    magnitude = abs(coef)
    if magnitude == 1:
        return f"{sign}{mono}"
    return f"{sign}{magnitude}*{mono}"


@dataclass(frozen=True)
class KummerTorsor:
    """
    The torsor {x^m = sign * rv(t)}; after theta, {x^m = sign} with mu_m action.
    """

    m: int
    field: str = "C"
    sign: int = 1
    action: Optional[Action] = None

    def key(self) -> Tuple:
        return (1, self.field, self.m, self.sign, _action_key(self.action))

    def label(self) -> str:
        target = "rv(t)" if self.action is None else "1"
        if self.sign < 0:
            target = "-" + target
        return f"[{{x^{self.m}={target}}}]"

    def to_dict(self) -> Dict:
        return {
            "type": "kummer", "m": self.m, "field": self.field, "sign": self.sign,
            "action": None if self.action is None else self.action.to_dict(),
        }


@dataclass(frozen=True)
class FaceHypersurface:
    """
    The curve {g = target} for a face polynomial g, inside G_m^2 unless
    affine is set (then inside A^2).

    vals holds the valuations of the two coordinates on the face's level-one
    point; theta turns them into the action weights.
    """

    terms: Tuple[Tuple[Tuple[int, int], Fraction], ...]
    field: str = "C"
    target: Fraction = Fraction(1)
    vals: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))
    action: Optional[Action] = None
    affine: bool = False

    def key(self) -> Tuple:
        return (0, self.field, self.affine, self.terms, self.target, self.vals,
                _action_key(self.action))

    def polynomial_string(self) -> str:
        return "".join(
            format_term(exp, coef, i == 0) for i, (exp, coef) in enumerate(self.terms)
        )

    def label(self) -> str:
        target = self.target
        shown = str(target) if self.action is not None else (
            "rv(t)" if target == 1 else f"{target}*rv(t)")
        torus = "" if self.affine else "∩Gm^2"
        return f"[{{{self.polynomial_string()}={shown}}}{torus}]"

    def to_dict(self) -> Dict:
        return {
            "type": "face", "field": self.field,
            "terms": [[list(exp), str(coef)] for exp, coef in self.terms],
            "target": str(self.target), "vals": [str(v) for v in self.vals],
            "action": None if self.action is None else self.action.to_dict(),
            "affine": self.affine,
        }


@dataclass(frozen=True)
class Named:
    """A class known only by name; its realizations come from the knowledge base."""

    identifier: str
    field: str = "C"
    action: Optional[Action] = None

    def key(self) -> Tuple:
        return (2, self.field, self.identifier, _action_key(self.action))

    def label(self) -> str:
        return f"[{self.identifier}]"

    def to_dict(self) -> Dict:
        return {
            "type": "named", "identifier": self.identifier, "field": self.field,
            "action": None if self.action is None else self.action.to_dict(),
        }


def atom_from_dict(data: Dict):
    """Rebuild an atom from its JSON form."""
    action = None if data.get("action") is None else Action.from_dict(data["action"])
    kind = data["type"]
    if kind == "kummer":
        return KummerTorsor(int(data["m"]), data["field"], int(data["sign"]), action)
    if kind == "face":
        terms = tuple((tuple(int(e) for e in exp), Fraction(coef)) for exp, coef in data["terms"])
        return FaceHypersurface(terms, data["field"], Fraction(data["target"]),
                                tuple(Fraction(v) for v in data["vals"]), action,
                                bool(data.get("affine", False)))
    if kind == "named":
        return Named(data["identifier"], data["field"], action)
    raise GrothError(f"unknown atom type {kind!r}")


# ---------------------------------------------------------------------------
# GrothElem
# ---------------------------------------------------------------------------

Monomial = Tuple[int, Tuple[Tuple[object, int], ...]]


def _merge_atoms(first, second) -> Tuple[Tuple[object, int], ...]:
    counts: Dict[object, int] = {}
    for atom, mult in first + second:
        counts[atom] = counts.get(atom, 0) + mult
    return tuple(sorted(counts.items(), key=lambda item: item[0].key()))


def _kummer_theta_action(m: int, field_name: str) -> Action:
    if field_name == "C":
        return Action("mu", m, (1,))
    return Action("swap", 2, (1,)) if m % 2 == 0 else Action.trivial()


def _kummer_group(atom) -> Optional[Tuple[str, bool]]:
    """Kummer atoms multiply among themselves when field and twist state agree."""
    if not isinstance(atom, KummerTorsor):
        return None
    if atom.action is None:
        return atom.field, False
    if atom.action == _kummer_theta_action(atom.m, atom.field):
        return atom.field, True
    return None


def _kummer_pair(a: KummerTorsor, b: KummerTorsor) -> List[Tuple[int, KummerTorsor]]:
    """
    Product of two Kummer torsors as a combination of single torsors.

    The presentation diag(a, b) has Smith form diag(gcd, lcm): over C the
    product is gcd copies of the degree-lcm torsor. Over R the copies are
    matched by their real points on both sides of t -> -t.
    """
    g, l = math.gcd(a.m, b.m), math.lcm(a.m, b.m)

    def make(sign: int) -> KummerTorsor:
        action = None if a.action is None else _kummer_theta_action(l, a.field)
        return KummerTorsor(l, a.field, sign, action)

    if a.field == "C":
        return [(g, make(1))]
    if l % 2:
        return [(1, make(1))]
    plus = _real_root_count(a.m, a.sign) * _real_root_count(b.m, b.sign)
    minus = _real_root_count(a.m, -a.sign) * _real_root_count(b.m, -b.sign)
    return [(count // 2, make(sign)) for count, sign in ((plus, 1), (minus, -1)) if count]


def _canonical_monomial(mono: "Monomial") -> List[Tuple["Monomial", int]]:
    """Collapse products of compatible Kummer atoms into single torsors."""
    a_exp, atoms = mono
    groups: Dict[Tuple[str, bool], List[KummerTorsor]] = {}
    rest = []
    for atom, mult in atoms:
        key = _kummer_group(atom)
        if key is None:
            rest.append((atom, mult))
        else:
            groups.setdefault(key, []).extend([atom] * mult)
    if all(len(factors) < 2 for factors in groups.values()):
        return [(mono, 1)]

    partial = [((), 1)]
    for key in sorted(groups):
        factors = groups[key]
        current = {factors[0]: 1}
        for factor in factors[1:]:
            merged: Dict[KummerTorsor, int] = {}
            for atom, coef in current.items():
                for mult, product_atom in _kummer_pair(atom, factor):
                    merged[product_atom] = merged.get(product_atom, 0) + coef * mult
            current = merged
        partial = [(chosen + ((atom, 1),), coef * mult)
                   for chosen, coef in partial for atom, mult in current.items()]
    return [((a_exp, _merge_atoms(tuple(rest), chosen)), coef) for chosen, coef in partial]


class GrothElem:
    """
    An integer combination of monomials [A]^n * (atom products).

    Elements are immutable; the normal form drops zero coefficients,
    collapses products of Kummer torsors into single torsors and stores
    atom products sorted by atom key, so equality is structural.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Dict[Monomial, int]] = None):
        clean = {}
        for mono, coef in (terms or {}).items():
            if not coef:
                continue
            for canon, mult in _canonical_monomial(mono):
                clean[canon] = clean.get(canon, 0) + coef * mult
        self._terms = {k: v for k, v in clean.items() if v}

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "GrothElem":
        return cls()

    @classmethod
    def one(cls) -> "GrothElem":
        return cls({(0, ()): 1})

    @classmethod
    def integer(cls, n: int) -> "GrothElem":
        return cls({(0, ()): n})

    @classmethod
    def affine(cls, n: int = 1) -> "GrothElem":
        """The class [A]^n (negative n lives in the localization)."""
        return cls({(n, ()): 1})

    @classmethod
    def atom(cls, atom) -> "GrothElem":
        return cls({(0, ((atom, 1),)): 1})

    @classmethod
    def coerce(cls, value) -> "GrothElem":
        if isinstance(value, GrothElem):
            return value
        if isinstance(value, int):
            return cls.integer(value)
        raise GrothError(f"cannot interpret {value!r} as a class")

    # -- ring structure -----------------------------------------------------

    def terms(self) -> List[Tuple[int, Tuple[Tuple[object, int], ...], int]]:
        """Sorted (A-exponent, atom product, coefficient) triples."""
        items = sorted(
            self._terms.items(),
            key=lambda item: (tuple((a.key(), m) for a, m in item[0][1]), item[0][0]),
        )
        return [(mono[0], mono[1], coef) for mono, coef in items]

    def __add__(self, other) -> "GrothElem":
        other = GrothElem.coerce(other)
        merged = dict(self._terms)
        for mono, coef in other._terms.items():
            merged[mono] = merged.get(mono, 0) + coef
        return GrothElem(merged)

    __radd__ = __add__

    def __neg__(self) -> "GrothElem":
        return GrothElem({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "GrothElem":
        return self + (-GrothElem.coerce(other))

    def __rsub__(self, other) -> "GrothElem":
        return GrothElem.coerce(other) - self

    def __mul__(self, other) -> "GrothElem":
        other = GrothElem.coerce(other)
        result: Dict[Monomial, int] = {}
        for (a1, atoms1), c1 in self._terms.items():
            for (a2, atoms2), c2 in other._terms.items():
                mono = (a1 + a2, _merge_atoms(atoms1, atoms2))
                result[mono] = result.get(mono, 0) + c1 * c2
        return GrothElem(result)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GrothElem":
        if n < 0:
            raise GrothError("negative powers are only defined for [A]")
        result = GrothElem.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = GrothElem.integer(other)
        if not isinstance(other, GrothElem):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_localized(self) -> bool:
        """True when some monomial carries a negative power of [A]."""
        return any(a < 0 for a, _ in self._terms)

    def atoms(self) -> List[object]:
        seen = []
        for _, atoms, _ in self.terms():
            for atom, _ in atoms:
                if atom not in seen:
                    seen.append(atom)
        return seen

    def map_atoms(self, func) -> "GrothElem":
        """
        Apply a map sending atoms to GrothElems, extended multiplicatively.
        """
        result = GrothElem.zero()
        for a_exp, atoms, coef in self.terms():
            piece = GrothElem({(a_exp, ()): coef})
            for atom, mult in atoms:
                piece = piece * (func(atom) ** mult)
            result = result + piece
        return result

    def shift_A(self, n: int) -> "GrothElem":
        return self * GrothElem.affine(n)

    # -- output -------------------------------------------------------------

    def to_dict(self) -> Dict:
        return {
            "kind": "GrothElem",
            "terms": [
                {
                    "coeff": coef,
                    "A": a_exp,
                    "atoms": [dict(atom.to_dict(), power=mult) for atom, mult in atoms],
                }
                for a_exp, atoms, coef in self.terms()
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "GrothElem":
        if data.get("kind") != "GrothElem":
            raise GrothError("not a GrothElem payload")
        terms = {}
        for term in data["terms"]:
            atoms = []
            for entry in term["atoms"]:
                entry = dict(entry)
                power = int(entry.pop("power"))
                atoms.append((atom_from_dict(entry), power))
            mono = (int(term["A"]), _merge_atoms(tuple(atoms), ()))
            terms[mono] = terms.get(mono, 0) + int(term["coeff"])
        return cls(terms)

    def describe(self, show_actions: bool = False) -> str:
        """
        Render the element with [G_m] = [A] - 1 factored out of each atom group.

        Args:
            show_actions: Append action tags to the atom labels

        Returns:
            Deterministic human-readable string
        """
        if self.is_zero():
            return "0"
        groups: Dict[Tuple, Dict[int, int]] = {}
        order = []
        for a_exp, atoms, coef in self.terms():
            if atoms not in groups:
                groups[atoms] = {}
                order.append(atoms)
            groups[atoms][a_exp] = groups[atoms].get(a_exp, 0) + coef

        A = sympy.Symbol("A")
        pieces = []
        for atoms in order:
            poly_terms = groups[atoms]
            low = min(poly_terms)
            poly = sympy.Poly(sum(c * A ** (e - low) for e, c in poly_terms.items()), A)
            gm_power = 0
            divisor = sympy.Poly(A - 1, A)
            while not poly.is_zero:
                quotient, remainder = sympy.div(poly, divisor)
                if not remainder.is_zero:
                    break
                poly, gm_power = quotient, gm_power + 1
            coeffs = {
                monom[0] + low: int(c) for monom, c in zip(poly.monoms(), poly.coeffs())
            }
            factors = []
            if gm_power:
                factors.append("[Gm]" if gm_power == 1 else f"[Gm]^{gm_power}")
            for atom, mult in atoms:
                label = atom.label()
                if show_actions and atom.action is not None and not atom.action.is_trivial:
                    label += f"~{atom.action}"
                factors.append(label if mult == 1 else f"{label}^{mult}")
            if len(coeffs) == 1:
                (exp, coef), = coeffs.items()
                if exp:
                    factors.insert(0, "[A]" if exp == 1 else f"[A]^{exp}")
                body = "*".join(factors)
                if not body:
                    pieces.append((coef, str(abs(coef))))
                elif abs(coef) == 1:
                    pieces.append((coef, body))
                else:
                    pieces.append((coef, f"{abs(coef)}*{body}"))
            else:
                inner = " + ".join(
                    f"{c}*[A]^{e}" if e else str(c) for e, c in sorted(coeffs.items(), reverse=True)
                ).replace("+ -", "- ")
                body = "*".join([f"({inner})"] + factors)
                pieces.append((1, body))

        text = ""
        for i, (coef, body) in enumerate(pieces):
            if i == 0:
                text = ("-" if coef < 0 else "") + body
            else:
                text += (" - " if coef < 0 else " + ") + body
        return text

    def __str__(self) -> str:
        return self.describe()

    def __repr__(self) -> str:
        return f"GrothElem({self.describe(show_actions=True)})"


def gm() -> GrothElem:
    """The class [G_m] = [A] - 1."""
    return GrothElem.affine(1) - GrothElem.one()


# ---------------------------------------------------------------------------
# Atom constructors
# ---------------------------------------------------------------------------

def _real_root_count(degree: int, sign: int) -> int:
    if degree % 2:
        return 1
    return 2 if sign > 0 else 0


def kummer(m: int, field_name: str = "C", sign: int = 1) -> GrothElem:
    """
    Class of the Kummer torsor {x^m = sign * rv(t)}.

    Args:
        m: Positive degree
        field_name: "C" or "R"
        sign: +1 or -1 (only meaningful over R for even m)

    Returns:
        GrothElem (the point class when m = 1)
    """
    _check_field(field_name)
    if m <= 0:
        raise GrothError("Kummer degree must be positive")
    if m == 1:
        return GrothElem.one()
    if field_name == "C" or m % 2:
        sign = 1
    return GrothElem.atom(KummerTorsor(m, field_name, 1 if sign > 0 else -1))


def _torsor_row(d: int, valuation: int, sign: int, field_name: str) -> GrothElem:
    """
    Class of {y^d = sign * c * t^valuation} for one reduced coordinate.

    With g = gcd(d, valuation) the set splits into {y^(d/g) = z * t^(valuation/g)}
    over the roots z of z^g = sign; over R only the real roots remain.
    """
    if valuation == 0:
        if field_name == "C":
            return GrothElem.integer(d)
        return GrothElem.integer(_real_root_count(d, sign))
    g = math.gcd(d, abs(valuation))
    reduced = d // g
    if field_name == "C":
        return GrothElem.integer(g) * kummer(reduced)
    if g % 2:
        return kummer(reduced, "R", sign)
    if sign < 0:
        return GrothElem.zero()
    return kummer(reduced, "R", 1) + kummer(reduced, "R", -1)


def _snf(matrix: Sequence[Sequence[int]]):
    """Smith normal form with transforms: (D, S, T) and D = S * M * T."""
    m = sympy.Matrix(matrix)
    return smith_normal_decomp(m, domain=sympy.ZZ)


def monomial_torsor(matrix: Sequence[Sequence[int]], valuations: Sequence[int],
                    field_name: str = "C", signs: Optional[Sequence[int]] = None) -> GrothElem:
    """
    Class of {x in G_m^n : x^(row_i) = sign_i * c_i * t^(valuation_i)}.

    The system is reduced by Smith normal form D = S*M*T: each nonzero
    invariant factor d gives a Kummer factor (or a point count when its
    transformed valuation is 0), zero rows are consistency conditions and
    the remaining coordinates are free G_m factors.

    Args:
        matrix: r x n integer exponent matrix
        valuations: Integer valuation of each target
        field_name: "C" or "R"
        signs: Target signs (default all +1)

    Returns:
        GrothElem
    """
    _check_field(field_name)
    rows = [list(map(int, row)) for row in matrix]
    r = len(rows)
    if r == 0:
        raise GrothError("empty torsor presentation")
    n = len(rows[0])
    signs = list(signs or [1] * r)
    if len(valuations) != r or len(signs) != r:
        raise GrothError("one valuation and one sign per row required")

    D, S, _ = _snf(rows)
    new_vals = [sum(int(S[i, j]) * int(valuations[j]) for j in range(r)) for i in range(r)]
    new_signs = []
    for i in range(r):
        sign = 1
        for j in range(r):
            if int(S[i, j]) % 2 and signs[j] < 0:
                sign = -sign
        new_signs.append(sign)

    result = GrothElem.one()
    rank = 0
    for i in range(r):
        d = int(D[i, i]) if i < n else 0
        if d == 0:
            if new_vals[i] != 0 or (field_name == "R" and new_signs[i] < 0):
                return GrothElem.zero()
            continue
        rank += 1
        result = result * _torsor_row(abs(d), new_vals[i], new_signs[i], field_name)
    return result * gm() ** (n - rank)


def _normalize_face(terms: Dict[Tuple[int, int], Fraction], field_name: str, target: Fraction):
    if field_name == "C":
        if len(terms) == 2:
            return {exp: Fraction(1) for exp in terms}, Fraction(1)
        return {exp: c / target for exp, c in terms.items()}, Fraction(1)
    if len(terms) == 2:
        return {exp: Fraction(1 if c / target > 0 else -1) for exp, c in terms.items()}, Fraction(1)
    scale = abs(target)
    return {exp: c / scale for exp, c in terms.items()}, Fraction(1 if target > 0 else -1)


def _binomial_split(terms, field_name: str, vals) -> Optional[GrothElem]:
    """[{s1 X^P + s2 X^Q = 1}] = [G_m] - [{X^Q = s2}] when (P, Q/e) is unimodular."""
    (p_exp, p_coef), (q_exp, q_coef) = terms
    for (first, _), (second, second_coef) in (((p_exp, p_coef), (q_exp, q_coef)),
                                              ((q_exp, q_coef), (p_exp, p_coef))):
        e = math.gcd(*second)
        if e == 0:
            continue
        primitive = (second[0] // e, second[1] // e)
        det = first[0] * primitive[1] - first[1] * primitive[0]
        if abs(det) != 1:
            continue
        level = second[0] * vals[0] + second[1] * vals[1]
        if level.denominator != 1:
            continue
        sign = 1 if second_coef > 0 else -1
        return gm() - _torsor_row(e, int(level), sign, field_name)
    return None


def face_hypersurface(terms: Dict[Tuple[int, int], object], field_name: str = "C",
                      target=1, vals: Sequence = (0, 0)) -> GrothElem:
    """
    Class of the torus curve {g = target} for a face polynomial g.

    Coefficients are normalized by torus rescaling, binomials with a
    unimodular exponent pair are split into [G_m] minus a torsor, and the
    variable swap (x, y) -> (y, x) is canonicalized.

    Args:
        terms: Map (i, j) -> nonzero coefficient
        field_name: "C" or "R"
        target: Right-hand side (nonzero)
        vals: Valuations of x and y on the face

    Returns:
        GrothElem
    """
    _check_field(field_name)
    terms = {tuple(exp): Fraction(c) for exp, c in terms.items() if c}
    target = Fraction(target)
    vals = tuple(Fraction(v) for v in vals)
    if len(terms) < 2 or target == 0:
        raise GrothError("face hypersurface needs at least two terms and a nonzero target")
    terms, target = _normalize_face(terms, field_name, target)

    ordered = tuple(sorted(terms.items(), reverse=True))
    if len(ordered) == 2 and target == 1:
        split = _binomial_split(ordered, field_name, vals)
        if split is not None:
            return split

    swapped = tuple(sorted((((j, i), c) for (i, j), c in terms.items()), reverse=True))
    if swapped > ordered:
        ordered, vals = swapped, (vals[1], vals[0])
    return GrothElem.atom(FaceHypersurface(ordered, field_name, target, vals))


def named(identifier: str, field_name: str = "C") -> GrothElem:
    return GrothElem.atom(Named(identifier, _check_field(field_name)))


# ---------------------------------------------------------------------------
# Maps on GrothElem
# ---------------------------------------------------------------------------

def _face_action(vals, field_name: str) -> Action:
    order = math.lcm(*(v.denominator for v in vals))
    weights = tuple(int(v * order) for v in vals)
    if field_name == "C":
        return Action("mu", order, weights)
    if order % 2:
        return Action.trivial()
    return Action("swap", 2, tuple(w % 2 for w in weights))


def _theta_atom(atom) -> GrothElem:
    if atom.action is not None:
        return GrothElem.atom(atom)
    if isinstance(atom, KummerTorsor):
        return GrothElem.atom(replace(atom, action=_kummer_theta_action(atom.m, atom.field)))
    if isinstance(atom, FaceHypersurface):
        return GrothElem.atom(replace(atom, action=_face_action(atom.vals, atom.field)))
    return GrothElem.atom(replace(atom, action=Action.trivial()))


def theta(e: GrothElem) -> GrothElem:
    """
    Twist RES-stage atoms back into equivariant variety classes.

    Kummer torsors become {x^m = 1} with mu_m acting with weight 1 (over R,
    the x -> -x swap for even m); face hypersurfaces receive the weights of
    their level-one valuations. Coefficients are unchanged.
    """
    return e.map_atoms(_theta_atom)


def _xi_atom(atom) -> GrothElem:
    if atom.field == "R":
        return GrothElem.atom(atom)
    if isinstance(atom, KummerTorsor):
        action = atom.action
        if action is not None:
            action = Action("swap", 2, (1,)) if atom.m % 2 == 0 else Action.trivial()
        return GrothElem.atom(KummerTorsor(atom.m, "R", 1, action))
    if isinstance(atom, FaceHypersurface):
        action = atom.action
        if action is not None:
            if action.order % 2:
                action = Action.trivial()
            else:
                action = Action("swap", 2, tuple(w % 2 for w in action.weights))
        return GrothElem.atom(replace(atom, field="R", action=action))
    raise GrothError(f"no real-points rule for {atom.label()}")


def xi(e: GrothElem) -> GrothElem:
    """
    Pass from complex classes with mu-hat action to real classes with mu_2 action.

    Additive; [A] over C goes to [A] over R.
    """
    result = GrothElem.zero()
    for a_exp, atoms, coef in e.terms():
        piece = GrothElem({(a_exp, ()): coef})
        for atom, mult in atoms:
            piece = piece * (_xi_atom(atom) ** mult)
        result = result + piece
    return result


def forget_actions(e: GrothElem) -> GrothElem:
    """Forgetful map: drop every action tag."""
    return e.map_atoms(lambda atom: GrothElem.atom(replace(atom, action=None)))


def negate_targets(e: GrothElem) -> GrothElem:
    """Substitute t -> -t in every torsor target (affine curves come back in torus form)."""

    def flip(atom) -> GrothElem:
        if isinstance(atom, KummerTorsor):
            if atom.field == "R" and atom.m % 2 == 0:
                return GrothElem.atom(replace(atom, sign=-atom.sign))
            return GrothElem.atom(atom)
        if isinstance(atom, FaceHypersurface) and atom.field == "R":
            flipped = face_hypersurface(dict(atom.terms), "R", -atom.target, atom.vals)
            return flipped if atom.action is None else theta(flipped)
        return GrothElem.atom(atom)

    return torus_expansion(e).map_atoms(flip)


def axis_class(atom: FaceHypersurface, axis: int) -> GrothElem:
    """
    Class of the points of the affine curve {g = target} on one coordinate axis.

    Args:
        atom: Face hypersurface
        axis: 0 for the x-axis (y = 0), 1 for the y-axis

    Returns:
        GrothElem (a Kummer class carrying the restricted action, or 0)
    """
    points = [(exp, c) for exp, c in atom.terms if exp[1 - axis] == 0]
    if not points:
        return GrothElem.zero()
    (exp, coef), = points
    degree = exp[axis]
    sign = 1 if atom.target / coef > 0 else -1
    if degree == 1:
        return GrothElem.one()
    if atom.field == "R" and degree % 2 == 0 and sign < 0:
        return GrothElem.zero()
    if atom.field == "C" or degree % 2:
        sign = 1
    action = atom.action
    if action is not None:
        weight = action.weights[axis] if action.weights else 0
        if atom.field == "C":
            g = math.gcd(action.order, weight)
            action = Action("mu", action.order // g, (weight // g,)) if weight % action.order else Action.trivial()
        else:
            action = Action("swap", 2, (1,)) if action.kind == "swap" and weight % 2 else Action.trivial()
    return GrothElem.atom(KummerTorsor(degree, atom.field, sign, action))


def affine_closure(e: GrothElem) -> GrothElem:
    """Rewrite torus curves [C ∩ G_m^2] as [C] minus the points of C on the axes."""

    def close(atom) -> GrothElem:
        if isinstance(atom, FaceHypersurface) and not atom.affine:
            return (GrothElem.atom(replace(atom, affine=True))
                    - axis_class(atom, 0) - axis_class(atom, 1))
        return GrothElem.atom(atom)

    return e.map_atoms(close)


def torus_expansion(e: GrothElem) -> GrothElem:
    """Inverse of affine_closure: [C] = [C ∩ G_m^2] + axis points."""

    def open_up(atom) -> GrothElem:
        if isinstance(atom, FaceHypersurface) and atom.affine:
            torus = replace(atom, affine=False)
            return GrothElem.atom(torus) + axis_class(torus, 0) + axis_class(torus, 1)
        return GrothElem.atom(atom)

    return e.map_atoms(open_up)


# ---------------------------------------------------------------------------
# Tensor elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineForm:
    """sigma(w) = const + sum(slopes[i] * w[i]) with integer slopes."""

    const: Fraction = Fraction(0)
    slopes: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "const", Fraction(self.const))
        slopes = tuple(self.slopes)
        for s in slopes:
            if Fraction(s).denominator != 1:
                raise GrothError("volume form slopes must be integers")
        object.__setattr__(self, "slopes", tuple(int(s) for s in slopes))

    def __call__(self, point: Sequence[Fraction]) -> Fraction:
        return self.const + sum((s * Fraction(x) for s, x in zip(self.slopes, point)), Fraction(0))

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.const + other.const, self.slopes + other.slopes)

    def __str__(self) -> str:
        parts = [str(self.const)] if self.const or not self.slopes else []
        for i, s in enumerate(self.slopes):
            if s:
                parts.append(f"{s}*w{i + 1}")
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class TensorSummand:
    """
    One summand res (x) gamma of an integral.

    Attributes:
        res: RES-stage class
        gamma: Gamma-set in Q^l
        sigma: Volume-form composite, total valuation of the original coordinates
        k: RES grading
        l: Gamma grading (ambient dimension of gamma)
        period: hm only sees the summand when period divides m
    """

    res: GrothElem
    gamma: GammaSet
    sigma: AffineForm = field(default_factory=AffineForm)
    k: int = 0
    l: int = 0
    period: int = 1
    label: str = ""

    def __post_init__(self):
        if self.gamma.ambient_dim != self.l:
            raise GrothError(f"gamma lives in Q^{self.gamma.ambient_dim}, grading says l={self.l}")
        if len(self.sigma.slopes) not in (0, self.l):
            raise GrothError("volume form and gamma disagree on dimension")
        if not self.sigma.slopes and self.l:
            object.__setattr__(self, "sigma", AffineForm(self.sigma.const, (0,) * self.l))

    def merge_key(self) -> Tuple:
        return (self.gamma.canonical(), self.sigma, self.k, self.l, self.period)

    def to_dict(self) -> Dict:
        return {
            "label": self.label, "res": self.res.to_dict(), "gamma": self.gamma.to_dict(),
            "sigma": str(self.sigma), "k": self.k, "l": self.l, "period": self.period,
        }

    def __str__(self) -> str:
        name = f"{self.label}: " if self.label else ""
        return (f"{name}({self.res}) (x) {self.gamma}  [k={self.k}, l={self.l}, "
                f"sigma={self.sigma}, period={self.period}]")


class TensorElem:
    """A finite formal sum of TensorSummands."""

    def __init__(self, summands: Iterable[TensorSummand] = ()):
        self.summands: Tuple[TensorSummand, ...] = tuple(
            s for s in summands if not s.res.is_zero() and not s.gamma.is_empty
        )

    @classmethod
    def single(cls, res, gamma: Optional[GammaSet] = None, sigma: Optional[AffineForm] = None,
               k: int = 0, period: int = 1, label: str = "") -> "TensorElem":
        gamma = gamma if gamma is not None else make_point()
        return cls([TensorSummand(GrothElem.coerce(res), gamma, sigma or AffineForm(),
                                  k, gamma.ambient_dim, period, label)])

    def __add__(self, other: "TensorElem") -> "TensorElem":
        return TensorElem(self.summands + other.summands)

    def __neg__(self) -> "TensorElem":
        return TensorElem(replace(s, res=-s.res) for s in self.summands)

    def __sub__(self, other: "TensorElem") -> "TensorElem":
        return self + (-other)

    def __mul__(self, other) -> "TensorElem":
        if isinstance(other, (int, GrothElem)):
            return TensorElem(replace(s, res=s.res * other) for s in self.summands)
        summands = []
        for a in self.summands:
            for b in other.summands:
                summands.append(TensorSummand(
                    a.res * b.res, product(a.gamma, b.gamma), a.sigma + b.sigma,
                    a.k + b.k, a.l + b.l, math.lcm(a.period, b.period),
                ))
        return TensorElem(summands)

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.summands)

    def __iter__(self):
        return iter(self.summands)

    def is_zero(self) -> bool:
        return not self.summands

    def simplify(self) -> "TensorElem":
        """Merge summands that share gamma, sigma, gradings and period."""
        merged: Dict[Tuple, TensorSummand] = {}
        order = []
        for s in self.summands:
            key = s.merge_key()
            if key in merged:
                merged[key] = replace(merged[key], res=merged[key].res + s.res)
            else:
                merged[key] = s
                order.append(key)
        return TensorElem(merged[key] for key in order)

    def bounded(self) -> "TensorElem":
        """
        Rewrite half-line summands into doubly bounded form.

        A ray (g0, oo) carried by a free coordinate of slope 1 in sigma is the
        translated unit ball, so res (x) (g0, oo) equals
        res (x) [t_g0] (one more RES coordinate) minus res at grading k.
        Both retractions are preserved by the rewrite.
        """
        out = []
        for s in self.summands:
            if s.gamma.is_bounded:
                out.append(s)
                continue
            if s.l != 1:
                raise UnsupportedInputError("only one-dimensional half-lines can be bounded")
            for cell in s.gamma.cells:
                piece_gamma = GammaSet(1, (cell,))
                if cell.is_bounded:
                    out.append(replace(s, gamma=piece_gamma))
                    continue
                lo, hi = cell.interval_bounds()
                if lo is None or hi is not None:
                    raise UnsupportedInputError(f"cannot bound the Gamma-part {cell}")
                if s.sigma.slopes != (1,):
                    raise UnsupportedInputError("half-line coordinate must enter sigma with slope 1")
                out.append(TensorSummand(
                    s.res, make_point(), AffineForm(s.sigma.const + lo), s.k + 1, 0,
                    math.lcm(s.period, lo.denominator), s.label,
                ))
                out.append(TensorSummand(
                    -s.res, make_point(), AffineForm(s.sigma.const), s.k, 0, s.period, s.label,
                ))
        return TensorElem(out).simplify()

    def to_dict(self) -> Dict:
        return {"kind": "TensorElem", "summands": [s.to_dict() for s in self.summands]}

    def __str__(self) -> str:
        if not self.summands:
            return "0"
        return "\n".join(str(s) for s in self.summands)


def eb(t: TensorElem) -> GrothElem:
    """Bounded retraction: sum of chi_b(gamma) * res * [G_m]^l."""
    total = GrothElem.zero()
    for s in t.summands:
        chi = chi_b(s.gamma)
        if chi:
            total = total + s.res * gm() ** s.l * chi
    return total


def eg(t: TensorElem) -> GrothElem:
    """Generic retraction: sum of chi_g(gamma) * res * [G_m]^l * [A]^-(k+l)."""
    total = GrothElem.zero()
    for s in t.summands:
        chi = chi_g(s.gamma)
        if chi:
            total = total + (s.res * gm() ** s.l * chi).shift_A(-(s.k + s.l))
    return total


def p_minus_one() -> TensorElem:
    """The relation element [1]_1 - [1] (x) (0, oo) - [1]_0."""
    return (
        TensorElem.single(1, k=1)
        - TensorElem([TensorSummand(GrothElem.one(), make_interval(0, None),
                                    AffineForm(0, (1,)), 0, 1)])
        - TensorElem.single(1, k=0)
    )


def p_gamma_positive(gamma, puiseux: bool = True) -> TensorElem:
    """[(0, gamma]] + [{t_gamma}]: the part of P_gamma whose h_m image evaluates to 1."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise GrothError("gamma must be positive")
    if not puiseux and gamma.denominator != 1:
        raise GrothError("over Laurent series only integer gamma has a definable point")
    segment = TensorElem([TensorSummand(GrothElem.one(), make_interval(0, gamma, False, True),
                                        AffineForm(0, (1,)), 0, 1)])
    point = TensorElem.single(1, sigma=AffineForm(gamma), k=1, period=gamma.denominator)
    return segment + point


def p_gamma(gamma, puiseux: bool = True) -> TensorElem:
    """The relation element P_gamma = [(0, gamma]] + [{t_gamma}] - [1]_1."""
    return p_gamma_positive(gamma, puiseux) - TensorElem.single(1, k=1)


# ---------------------------------------------------------------------------
# Laurent polynomials in T
# ---------------------------------------------------------------------------

class TPoly:
    """A Laurent polynomial in T with GrothElem coefficients."""

    def __init__(self, coeffs: Optional[Dict[int, GrothElem]] = None):
        self.coeffs: Dict[int, GrothElem] = {
            e: c for e, c in (coeffs or {}).items() if not c.is_zero()
        }

    def __add__(self, other: "TPoly") -> "TPoly":
        merged = dict(self.coeffs)
        for e, c in other.coeffs.items():
            merged[e] = merged.get(e, GrothElem.zero()) + c
        return TPoly(merged)

    def __eq__(self, other) -> bool:
        return isinstance(other, TPoly) and self.coeffs == other.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*T^{e}" for e, c in sorted(self.coeffs.items()))


def hm(t: TensorElem, m: int, limit: int = 200000) -> TPoly:
    """
    The map h_m: each lattice point g of gamma in (1/m)Z^l contributes
    res * [G_m]^l * T^(-m * sigma(g)).

    Args:
        t: TensorElem with bounded Gamma-parts
        m: Positive integer
        limit: Enumeration guard handed to lattice_points

    Returns:
        TPoly
    """
    if m <= 0:
        raise GrothError("m must be positive")
    result: Dict[int, GrothElem] = {}
    for s in t.summands:
        if m % s.period:
            continue
        if not s.gamma.is_bounded:
            raise GrothError("hm needs bounded Gamma-parts; call bounded() first")
        weight = s.res * gm() ** s.l
        for point in lattice_points(s.gamma, m, limit):
            exponent = -m * s.sigma(point)
            if exponent.denominator != 1:
                raise GrothError(f"non-integer exponent {exponent} at m={m}")
            e = int(exponent)
            result[e] = result.get(e, GrothElem.zero()) + weight
    return TPoly(result)


def eta(p: TPoly) -> GrothElem:
    """Substitute T := [A]."""
    total = GrothElem.zero()
    for e, c in p.coeffs.items():
        total = total + c.shift_A(e)
    return total


# ---------------------------------------------------------------------------
# Monomially presented RV-sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RVMonomialSet:
    """
    A subset of RV^n cut out by monomial leading-term conditions and
    rational inequalities among the coordinate valuations.

    Attributes:
        n: Number of RV coordinates
        rows: (exponent row, target valuation, target sign) triples;
            valuation 1 means rv(t), 0 a constant
        valuation_constraints: (functional, relation) pairs with relation
            one of "gt", "ge", "eq" and functional (c0, c1, ..., cn)
        field: "C" or "R"
    """

    n: int
    rows: Tuple[Tuple[Tuple[int, ...], int, int], ...] = ()
    valuation_constraints: Tuple[Tuple[Tuple, str], ...] = ()
    field: str = "C"


def twistoid_decompose(s: RVMonomialSet) -> TensorElem:
    """
    Rewrite a monomial RV-set as RES-torsor (x) Gamma-polytope summands.

    The exponent matrix is reduced by Smith normal form; coordinates attached
    to invariant factors carry the torsor, the remaining coordinates are free
    with valuations constrained by the pulled-back inequalities.
    """
    _check_field(s.field)
    n = s.n
    if not s.rows:
        rank, D, S, T = 0, None, None, sympy.eye(n)
        new_vals = []
        res = GrothElem.one()
        period = 1
        fixed = []
    else:
        matrix = [list(row) for row, _, _ in s.rows]
        for row in matrix:
            if len(row) != n:
                raise GrothError("exponent row has the wrong length")
        D, S, T = _snf(matrix)
        r = len(matrix)
        valuations = [v for _, v, _ in s.rows]
        signs = [sg for _, _, sg in s.rows]
        new_vals = [sum(int(S[i, j]) * valuations[j] for j in range(r)) for i in range(r)]
        res = GrothElem.one()
        period = 1
        fixed = []
        for i in range(r):
            d = int(D[i, i]) if i < n else 0
            if d == 0:
                if new_vals[i] != 0:
                    raise GrothError("inconsistent constraint system")
                continue
            sign = 1
            for j in range(r):
                if int(S[i, j]) % 2 and signs[j] < 0:
                    sign = -sign
            if d < 0:
                d, new_vals[i] = -d, -new_vals[i]
            res = res * _torsor_row(d, new_vals[i], sign, s.field)
            value = Fraction(new_vals[i], d)
            period = math.lcm(period, value.denominator)
            fixed.append(value)
        rank = len(fixed)

    free = n - rank
    # v(x) = T * (fixed values ; free coordinates)
    Tm = [[int(T[i, j]) for j in range(n)] for i in range(n)]
    offset = [sum((Tm[i][j] * fixed[j] for j in range(rank)), Fraction(0)) for i in range(n)]
    linear = [[Tm[i][rank + j] for j in range(free)] for i in range(n)]

    equalities, strict, weak = [], [], []
    for func, relation in s.valuation_constraints:
        func = [Fraction(c) for c in func]
        const = func[0] + sum((func[i + 1] * offset[i] for i in range(n)), Fraction(0))
        pulled = [const] + [sum((func[i + 1] * linear[i][j] for i in range(n)), Fraction(0))
                            for j in range(free)]
        {"eq": equalities, "gt": strict, "ge": weak}[relation].append(tuple(pulled))

    cells = []
    for mask in range(2 ** len(weak)):
        eqs = list(equalities)
        gts = list(strict)
        for i, func in enumerate(weak):
            (eqs if mask >> i & 1 else gts).append(func)
        try:
            cells.append(make_cell(free, eqs, gts))
        except GammaError:
            continue
    if not cells:
        raise GrothError("inconsistent constraint system")

    sigma = AffineForm(sum(offset, Fraction(0)),
                       tuple(sum(linear[i][j] for i in range(n)) for j in range(free)))
    return TensorElem([TensorSummand(res, GammaSet(free, tuple(cells), disjoint=True), sigma, rank, free, period)])
