"""
Realization Module - Numbers and polynomials from symbolic classes.
Complex and real Euler characteristics, the virtual Poincare polynomial
beta and its mu_2-equivariant variant, driven by built-in rules plus a
knowledge base of pinned values with provenance.
"""

import csv
import logging
import os
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Dict, List, Optional

import sympy

from config import MM_KB_PATH
from gamma_calc import MotivicError
from groth_core import (
    FaceHypersurface,
    GrothElem,
    KummerTorsor,
    Named,
    axis_class,
    forget_actions,
)
from newton_engine import LaurentPoly, khovanskii_chi, real_torus_chi, torus_nondegenerate

logger = logging.getLogger(__name__)

U = sympy.Symbol("u")

REALIZATIONS = ("chi_complex", "chi_real", "beta", "beta_mu2", "beta_puR")
PROVENANCES = ("builtin", "pinned", "user")


class RealizationError(MotivicError):
    """Custom exception for atoms no rule or knowledge-base entry covers."""
    pass


def atom_id(atom, with_action: bool = False) -> str:
    """
    Stable identifier of an atom, the key of knowledge-base entries.

    Args:
        atom: KummerTorsor, FaceHypersurface or Named
        with_action: Append the action tag (used by equivariant realizations)

    Returns:
        String such as "R:face:x^6+x^2y^2=1:torus"
    """
    if isinstance(atom, KummerTorsor):
        ident = f"{atom.field}:kummer:{atom.m}:{'+' if atom.sign > 0 else '-'}"
    elif isinstance(atom, FaceHypersurface):
        where = "affine" if atom.affine else "torus"
        ident = f"{atom.field}:face:{atom.polynomial_string()}={atom.target}:{where}"
    elif isinstance(atom, Named):
        ident = f"{atom.field}:named:{atom.identifier}"
    else:
        raise RealizationError(f"unknown atom {atom!r}")
    if with_action and atom.action is not None and not atom.action.is_trivial:
        ident += f"~{atom.action}"
    return ident


@dataclass(frozen=True)
class KBEntry:
    """One pinned value."""

    atom_id: str
    realization: str
    value: str
    provenance: str

    def parsed(self) -> sympy.Expr:
        return sympy.sympify(self.value, locals={"u": U})


class KnowledgeBase:
    """
    Realization values keyed by (atom id, realization name).

    Built-in rules are consulted before the knowledge base; lookups never
    guess, a missing entry raises RealizationError.
    """

    def __init__(self, entries: Optional[List[KBEntry]] = None):
        self._entries: Dict[tuple, KBEntry] = {}
        for entry in entries or []:
            self._add(entry)

    def _add(self, entry: KBEntry):
        if entry.realization not in REALIZATIONS:
            raise RealizationError(f"unknown realization {entry.realization!r}")
        if entry.provenance not in PROVENANCES:
            raise RealizationError(f"unknown provenance {entry.provenance!r}")
        key = (entry.atom_id, entry.realization)
        if key in self._entries and self._entries[key].value != entry.value:
            raise RealizationError(f"conflicting entries for {key}")
        self._entries[key] = entry

    @classmethod
    def load(cls, path: str) -> "KnowledgeBase":
        """
        Read a TSV file: atom-id, realization, value, provenance per line.
        Blank lines and lines starting with # are skipped.
        """
        entries = []
        if not os.path.exists(path):
            logger.warning("knowledge base %s not found; starting empty", path)
            return cls()
        with open(path, "r", encoding="utf-8", newline="") as handle:
            for lineno, row in enumerate(csv.reader(handle, delimiter="\t"), start=1):
                if not row or not row[0].strip() or row[0].startswith("#"):
                    continue
                if len(row) != 4:
                    raise RealizationError(f"{path}:{lineno}: expected 4 tab-separated fields")
                entries.append(KBEntry(*(field.strip() for field in row)))
        logger.debug("loaded %d knowledge-base entries from %s", len(entries), path)
        return cls(entries)

    def register(self, ident: str, realization: str, value, provenance: str = "user") -> KBEntry:
        """Add a user entry; re-registering the same value is a no-op."""
        entry = KBEntry(ident, realization, str(value), provenance)
        self._add(entry)
        return entry

    def lookup(self, ident: str, realization: str) -> Optional[KBEntry]:
        return self._entries.get((ident, realization))

    def entries(self) -> List[KBEntry]:
        return [self._entries[key] for key in sorted(self._entries)]

    def __len__(self) -> int:
        return len(self._entries)


@lru_cache(maxsize=1)
def default_knowledge_base() -> KnowledgeBase:
    """The knowledge base named by MM_KB_PATH, loaded once."""
    return KnowledgeBase.load(MM_KB_PATH)


def _kb(kb: Optional[KnowledgeBase]) -> KnowledgeBase:
    return kb if kb is not None else default_knowledge_base()


def _evaluate(e: GrothElem, a_value, atom_value: Callable):
    """Ring-homomorphic evaluation: [A] -> a_value, atoms -> atom_value(atom)."""
    total = sympy.Integer(0)
    for a_exp, atoms, coef in e.terms():
        term = sympy.Integer(coef) * sympy.sympify(a_value) ** a_exp
        for atom, mult in atoms:
            term *= sympy.sympify(atom_value(atom)) ** mult
        total += term
    return sympy.expand(total)


def _face_poly(atom: FaceHypersurface) -> LaurentPoly:
    shifted = dict(atom.terms)
    shifted[(0, 0)] = shifted.get((0, 0), 0) - atom.target
    return LaurentPoly.from_dict(shifted)


@lru_cache(maxsize=None)
def _smooth_face_poly(atom: FaceHypersurface) -> LaurentPoly:
    """The equation of a face curve, verified nondegenerate for its Newton polygon."""
    g = _face_poly(atom)
    if not torus_nondegenerate(g):
        raise RealizationError(f"{atom.label()} is degenerate in the torus; no Euler rule applies")
    return g


def _torus_value(atom: FaceHypersurface, rule: Callable) -> sympy.Expr:
    """Value of an affine curve from its torus part and its axis points."""
    torus = replace(atom, affine=False)
    return rule(torus) + sum(
        (_evaluate(axis_class(torus, axis), 1, rule) for axis in (0, 1)), sympy.Integer(0))


def _require_field(atom, field_name: str):
    if atom.field != field_name:
        raise RealizationError(
            f"{atom.label()} is a class over {atom.field}; this realization needs {field_name}")


def _kb_value(atom, realization: str, kb: KnowledgeBase, with_action: bool = False):
    entry = kb.lookup(atom_id(atom, with_action), realization)
    if entry is None:
        raise RealizationError(
            f"no {realization} rule for {atom_id(atom, with_action)}; register KB entry")
    return entry.parsed()


def realize_complex(e: GrothElem, kb: Optional[KnowledgeBase] = None) -> int:
    """
    Complex Euler characteristic.

    Args:
        e: Class over C
        kb: Knowledge base (default: MM_KB_PATH)

    Returns:
        Integer
    """
    kb = _kb(kb)

    def rule(atom):
        _require_field(atom, "C")
        if isinstance(atom, KummerTorsor):
            return atom.m
        if isinstance(atom, FaceHypersurface):
            if atom.affine:
                return _torus_value(atom, rule)
            return khovanskii_chi(_smooth_face_poly(atom), check=False)
        return _kb_value(atom, "chi_complex", kb)

    return int(_evaluate(e, 1, rule))


def realize_real(e: GrothElem, kb: Optional[KnowledgeBase] = None) -> int:
    """
    Semialgebraic Euler characteristic with [A] -> -1.

    Args:
        e: Class over R
        kb: Knowledge base (default: MM_KB_PATH)

    Returns:
        Integer
    """
    kb = _kb(kb)

    def rule(atom):
        _require_field(atom, "R")
        if isinstance(atom, KummerTorsor):
            return 1 if atom.m % 2 else (2 if atom.sign > 0 else 0)
        if isinstance(atom, FaceHypersurface):
            if atom.affine:
                return _torus_value(atom, rule)
            return real_torus_chi(_smooth_face_poly(atom))
        return _kb_value(atom, "chi_real", kb)

    return int(_evaluate(e, -1, rule))


def _beta_rule(kb: KnowledgeBase) -> Callable:
    def rule(atom):
        _require_field(atom, "R")
        if isinstance(atom, KummerTorsor):
            return 1 if atom.m % 2 else (2 if atom.sign > 0 else 0)
        plain = replace(atom, action=None)
        entry = kb.lookup(atom_id(plain), "beta")
        if entry is not None:
            return entry.parsed()
        if isinstance(atom, FaceHypersurface):
            if atom.affine:
                return _torus_value(plain, rule)
            closed = kb.lookup(atom_id(replace(plain, affine=True)), "beta")
            if closed is not None:
                axes = sum((_evaluate(axis_class(plain, axis), U, rule) for axis in (0, 1)),
                           sympy.Integer(0))
                return closed.parsed() - axes
        return _kb_value(plain, "beta", kb)

    return rule


def beta(e: GrothElem, kb: Optional[KnowledgeBase] = None) -> sympy.Expr:
    """
    Virtual Poincare polynomial in u: [A] -> u, real Kummer torsors by point
    count, other atoms from the knowledge base. Action tags are ignored.
    """
    return _evaluate(forget_actions(e), U, _beta_rule(_kb(kb)))


def _is_swapped(atom) -> bool:
    return atom.action is not None and atom.action.kind == "swap" and not atom.action.is_trivial


def beta_mu2(e: GrothElem, kb: Optional[KnowledgeBase] = None) -> sympy.Expr:
    """
    Equivariant virtual Poincare series, additive only.

    Per monomial: a free swap on one Kummer factor is divided out (its
    quotient is a point); a swapped curve takes its pinned equivariant value
    times beta of the remaining factors; monomials with trivial action give
    beta times the Poincare series u/(u - 1) of the classifying space,
    expanded in u^-1.

    Args:
        e: Real class with mu_2 tags
        kb: Knowledge base (default: MM_KB_PATH)

    Returns:
        sympy expression in u
    """
    kb = _kb(kb)
    rule = _beta_rule(kb)
    total = sympy.Integer(0)
    for a_exp, atoms, coef in e.terms():
        swapped = [(atom, mult) for atom, mult in atoms if _is_swapped(atom)]
        rest = GrothElem({(a_exp, tuple(item for item in atoms if not _is_swapped(item[0]))): coef})
        if not swapped:
            total += beta(rest, kb) * U / (U - 1)
            continue
        if len(swapped) > 1 or swapped[0][1] > 1:
            raise RealizationError("several swapped factors in one monomial; register KB entry")
        atom = swapped[0][0]
        if isinstance(atom, KummerTorsor):
            quotient = 1 if atom.sign > 0 else 0
            total += quotient * _evaluate(forget_actions(rest), U, rule)
        else:
            total += _kb_value(atom, "beta_mu2", kb, with_action=True) * _evaluate(
                forget_actions(rest), U, rule)
    return sympy.expand(sympy.cancel(total))


def beta_lim(f: LaurentPoly, kb: Optional[KnowledgeBase] = None) -> sympy.Expr:
    """beta of the forgetful image of the real motivic Milnor fiber."""
    from milnor_calc import motivic_fiber_b

    return beta(forget_actions(motivic_fiber_b(f, "R")), kb)


def milnor_fiber_id(f: LaurentPoly) -> str:
    return f"R:named:milnor-fiber({f})"


def beta_puR(f: LaurentPoly, kb: Optional[KnowledgeBase] = None) -> sympy.Expr:
    """Pinned beta of the Milnor fiber variety of f (compact-reduction side)."""
    entry = _kb(kb).lookup(milnor_fiber_id(f), "beta_puR")
    if entry is None:
        raise RealizationError(f"no beta_puR value for {f}; register KB entry")
    return entry.parsed()
