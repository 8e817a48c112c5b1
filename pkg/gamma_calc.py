"""
Gamma Calculus Module - Exact rational polyhedral sets in Q^k.
Provides relatively open cells, finite disjoint unions of them, and the
two Euler characteristics chi_g and chi_b used by the retractions.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, lpmax, lpmin

logger = logging.getLogger(__name__)

# An affine functional c0 + c1*x1 + ... + ck*xk stored as (c0, c1, ..., ck).
Functional = Tuple[Fraction, ...]


class MotivicError(Exception):
    """Base exception for every error raised by the engine."""
    pass


class GammaError(MotivicError):
    """Custom exception for invalid or empty Gamma-sets."""
    pass


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


def _functional(values: Iterable) -> Functional:
    return tuple(_as_fraction(v) for v in values)


def _primitive(func: Functional) -> Functional:
    """Scale a functional by a positive rational to coprime integer entries."""
    denominators = [c.denominator for c in func]
    lcm = math.lcm(*denominators) if denominators else 1
    ints = [int(c * lcm) for c in func]
    g = math.gcd(*ints) if ints else 0
    if g == 0:
        return func
    return tuple(Fraction(c, g) for c in ints)


def _evaluate(func: Functional, point: Sequence[Fraction]) -> Fraction:
    return func[0] + sum((c * x for c, x in zip(func[1:], point)), Fraction(0))


def _rref_equalities(equalities: List[Functional], ambient_dim: int) -> Tuple[List[Functional], List[int]]:
    """Row-reduce equalities; returns canonical rows and pivot columns (1-based in the functional)."""
    if not equalities:
        return [], []
    # Column 0 holds the constant; put it last so pivots land on variables.
    rows = [list(eq[1:]) + [eq[0]] for eq in equalities]
    matrix = sympy.Matrix(rows).applyfunc(sympy.Rational)
    reduced, pivots = matrix.rref()
    canonical = []
    pivot_columns = []
    for i, pivot in enumerate(pivots):
        if pivot == ambient_dim:
            raise GammaError("inconsistent equality system")
        row = [_as_fraction(reduced[i, j]) for j in range(ambient_dim + 1)]
        canonical.append(tuple([row[-1]] + row[:-1]))
        pivot_columns.append(pivot + 1)
    return canonical, pivot_columns


@dataclass(frozen=True)
class GammaCell:
    """
    A nonempty relatively open rational polyhedron in Q^k.

    The cell is {x : e(x) = 0 for every equality e, h(x) > 0 for every strict
    inequality h}. The presentation is normalized at construction: equalities
    are row reduced, strict inequalities are reduced modulo the equalities
    and scaled to primitive integer form, so equal presentations compare equal.
    """

    ambient_dim: int
    equalities: Tuple[Functional, ...] = ()
    strict_inequalities: Tuple[Functional, ...] = ()
    _bounded: Optional[bool] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        k = self.ambient_dim
        if k < 0:
            raise GammaError("ambient dimension must be nonnegative")
        raw_eqs = [_functional(e) for e in self.equalities]
        raw_ineqs = [_functional(h) for h in self.strict_inequalities]
        for func in raw_eqs + raw_ineqs:
            if len(func) != k + 1:
                raise GammaError(f"functional {func} does not live on Q^{k}")

        eqs, pivots = _rref_equalities([e for e in raw_eqs if any(e[1:]) or e[0] != 0], k)

        ineqs = set()
        for h in raw_ineqs:
            h = list(h)
            for eq, col in zip(eqs, pivots):
                coef = h[col]
                if coef:
                    h = [a - coef * b for a, b in zip(h, eq)]
            h = tuple(h)
            if not any(h[1:]):
                if h[0] > 0:
                    continue
                raise GammaError("empty cell: violated constant inequality")
            ineqs.add(_primitive(h))

        object.__setattr__(self, "equalities", tuple(eqs))
        object.__setattr__(self, "strict_inequalities", tuple(sorted(ineqs)))

        if not self._strictly_feasible():
            raise GammaError("empty cell")

    # -- linear programming -------------------------------------------------

    def _symbols(self):
        return sympy.symbols(f"x0:{self.ambient_dim}") if self.ambient_dim else ()

    def _expr(self, func: Functional, symbols) -> sympy.Expr:
        expr = sympy.Rational(func[0].numerator, func[0].denominator)
        for c, s in zip(func[1:], symbols):
            expr += sympy.Rational(c.numerator, c.denominator) * s
        return expr

    def _closure_constraints(self, symbols) -> list:
        constraints = []
        for eq in self.equalities:
            expr = self._expr(eq, symbols)
            constraints.append(expr >= 0)
            constraints.append(expr <= 0)
        for h in self.strict_inequalities:
            constraints.append(self._expr(h, symbols) >= 0)
        return constraints

    def _strictly_feasible(self) -> bool:
        if not self.strict_inequalities:
            return True
        symbols = self._symbols()
        slack = sympy.Symbol("slack")
        constraints = []
        for eq in self.equalities:
            expr = self._expr(eq, symbols)
            constraints.append(expr >= 0)
            constraints.append(expr <= 0)
        for h in self.strict_inequalities:
            constraints.append(self._expr(h, symbols) - slack >= 0)
        constraints.append(slack <= 1)
        try:
            best, _ = lpmax(slack, constraints)
        except InfeasibleLPError:
            return False
        return best > 0

    def coordinate_range(self, index: int) -> Tuple[Optional[Fraction], Optional[Fraction]]:
        """
        Exact infimum and supremum of one coordinate over the cell.

        Args:
            index: Coordinate index (0-based)

        Returns:
            Tuple (lo, hi) with None marking an infinite side
        """
        if not any(f[index + 1] for f in self.equalities + self.strict_inequalities):
            return None, None
        symbols = self._symbols()
        constraints = self._closure_constraints(symbols)
        target = symbols[index]
        bounds = []
        for solver in (lpmin, lpmax):
            try:
                value, _ = solver(target, constraints)
                bounds.append(_as_fraction(value))
            except UnboundedLPError:
                bounds.append(None)
        return bounds[0], bounds[1]

    # -- invariants ---------------------------------------------------------

    @property
    def dimension(self) -> int:
        return self.ambient_dim - len(self.equalities)

    @property
    def is_bounded(self) -> bool:
        if self._bounded is None:
            bounded = all(
                None not in self.coordinate_range(i) for i in range(self.ambient_dim)
            )
            object.__setattr__(self, "_bounded", bounded)
        return self._bounded

    def contains(self, point: Sequence) -> bool:
        point = [_as_fraction(x) for x in point]
        return all(_evaluate(e, point) == 0 for e in self.equalities) and all(
            _evaluate(h, point) > 0 for h in self.strict_inequalities
        )

    def intersects(self, other: "GammaCell") -> bool:
        try:
            GammaCell(
                self.ambient_dim,
                self.equalities + other.equalities,
                self.strict_inequalities + other.strict_inequalities,
            )
        except GammaError:
            return False
        return True

    def interval_bounds(self) -> Tuple[Optional[Fraction], Optional[Fraction]]:
        """Endpoints of a cell of Q^1; a point returns (p, p)."""
        if self.ambient_dim != 1:
            raise GammaError("interval bounds only exist in Q^1")
        if self.equalities:
            c0, c1 = self.equalities[0]
            point = -c0 / c1
            return point, point
        lo, hi = None, None
        for c0, c1 in self.strict_inequalities:
            edge = -c0 / c1
            if c1 > 0:
                lo = edge if lo is None else max(lo, edge)
            else:
                hi = edge if hi is None else min(hi, edge)
        return lo, hi

    def to_dict(self) -> Dict:
        return {
            "ambient_dim": self.ambient_dim,
            "equalities": [[str(c) for c in e] for e in self.equalities],
            "strict_inequalities": [[str(c) for c in h] for h in self.strict_inequalities],
        }

    def __str__(self) -> str:
        if self.ambient_dim == 0:
            return "pt"
        if self.ambient_dim == 1:
            lo, hi = self.interval_bounds()
            if lo is not None and lo == hi:
                return f"{{{lo}}}"
            left = "-oo" if lo is None else str(lo)
            right = "oo" if hi is None else str(hi)
            return f"({left}, {right})"
        parts = [f"{_format_functional(e)} = 0" for e in self.equalities]
        parts += [f"{_format_functional(h)} > 0" for h in self.strict_inequalities]
        return "{" + ", ".join(parts) + "}"


def _format_functional(func: Functional) -> str:
    pieces = []
    for i, c in enumerate(func[1:]):
        if c:
            pieces.append(f"{c}*w{i + 1}")
    if func[0] or not pieces:
        pieces.append(str(func[0]))
    return " + ".join(pieces)


@dataclass(frozen=True)
class GammaSet:
    """
    A finite disjoint union of relatively open cells of a common Q^k.

    Pairwise disjointness is verified on construction; operations whose
    output is disjoint by construction pass disjoint=True to skip the LPs.
    """

    ambient_dim: int
    cells: Tuple[GammaCell, ...] = ()
    disjoint: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        for cell in self.cells:
            if cell.ambient_dim != self.ambient_dim:
                raise GammaError("cells live in different ambient spaces")
        if not self.disjoint:
            for a, b in itertools.combinations(self.cells, 2):
                if a.intersects(b):
                    raise GammaError(f"cells {a} and {b} overlap")
            object.__setattr__(self, "disjoint", True)

    @classmethod
    def checked(cls, ambient_dim: int, cells: Iterable[GammaCell]) -> "GammaSet":
        """Build a GammaSet from cells of unknown provenance."""
        return cls(ambient_dim, tuple(cells))

    @property
    def is_empty(self) -> bool:
        return not self.cells

    @property
    def is_bounded(self) -> bool:
        return all(cell.is_bounded for cell in self.cells)

    def canonical(self) -> Tuple:
        """Order-independent key used to merge tensor summands."""
        return (self.ambient_dim, tuple(sorted(
            (c.equalities, c.strict_inequalities) for c in self.cells
        )))

    def to_dict(self) -> Dict:
        return {"ambient_dim": self.ambient_dim, "cells": [c.to_dict() for c in self.cells]}

    def __str__(self) -> str:
        if not self.cells:
            return "{}"
        return " u ".join(str(c) for c in self.cells)


def make_cell(ambient_dim: int, equalities: Iterable = (), strict_inequalities: Iterable = ()) -> GammaCell:
    """Construct a single cell from raw coefficient rows."""
    return GammaCell(ambient_dim, tuple(map(_functional, equalities)),
                     tuple(map(_functional, strict_inequalities)))


def make_point(coords: Sequence = ()) -> GammaSet:
    """
    A single point of Q^k (k = len(coords)); the empty tuple is the point of Q^0.
    """
    k = len(coords)
    equalities = []
    for i, value in enumerate(coords):
        row = [Fraction(0)] * (k + 1)
        row[0] = -_as_fraction(value)
        row[i + 1] = Fraction(1)
        equalities.append(tuple(row))
    return GammaSet(k, (GammaCell(k, tuple(equalities)),))


def make_interval(lo, hi, lo_closed: bool = False, hi_closed: bool = False) -> GammaSet:
    """
    Build an interval of Q^1 as at most three cells.

    Args:
        lo: Lower end, a rational or None for -infinity
        hi: Upper end, a rational or None for +infinity
        lo_closed: Whether the lower end belongs to the set
        hi_closed: Whether the upper end belongs to the set

    Returns:
        GammaSet made of an open core plus endpoint cells
    """
    lo = None if lo is None else _as_fraction(lo)
    hi = None if hi is None else _as_fraction(hi)
    if lo is None and lo_closed or hi is None and hi_closed:
        raise GammaError("an infinite end cannot be closed")
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            raise GammaError(f"empty interval ({lo}, {hi})")
        if lo == hi:
            return make_point((lo,))

    strict = []
    if lo is not None:
        strict.append((-lo, Fraction(1)))
    if hi is not None:
        strict.append((hi, Fraction(-1)))
    cells = [GammaCell(1, (), tuple(strict))]
    if lo_closed:
        cells.insert(0, make_point((lo,)).cells[0])
    if hi_closed:
        cells.append(make_point((hi,)).cells[0])
    return GammaSet(1, tuple(cells), disjoint=True)


def union(first: GammaSet, second: GammaSet) -> GammaSet:
    """Disjoint union; overlapping cells are rejected."""
    if first.ambient_dim != second.ambient_dim:
        raise GammaError("cannot unite sets of different ambient dimension")
    return GammaSet.checked(first.ambient_dim, first.cells + second.cells)


def chi_g(s: GammaSet) -> int:
    """Euler characteristic with chi_g((0, oo)) = -1."""
    return sum((-1) ** cell.dimension for cell in s.cells)


def chi_b(s: GammaSet) -> int:
    """Euler characteristic with chi_b((0, oo)) = 0: unbounded cells count 0."""
    return sum((-1) ** cell.dimension for cell in s.cells if cell.is_bounded)


def _shift(func: Functional, before: int, after: int) -> Functional:
    return (func[0],) + (Fraction(0),) * before + func[1:] + (Fraction(0),) * after


def product(s1: GammaSet, s2: GammaSet) -> GammaSet:
    """Cellwise cartesian product in Q^(k1+k2)."""
    k1, k2 = s1.ambient_dim, s2.ambient_dim
    cells = []
    for a in s1.cells:
        for b in s2.cells:
            equalities = tuple(_shift(e, 0, k2) for e in a.equalities) + tuple(
                _shift(e, k1, 0) for e in b.equalities)
            strict = tuple(_shift(h, 0, k2) for h in a.strict_inequalities) + tuple(
                _shift(h, k1, 0) for h in b.strict_inequalities)
            cells.append(GammaCell(k1 + k2, equalities, strict))
    return GammaSet(k1 + k2, tuple(cells), disjoint=True)


def refine(s: GammaSet, h: Sequence) -> GammaSet:
    """
    Split every cell along {h = 0}, {h > 0} and {h < 0}.

    Args:
        s: The set to refine
        h: Affine functional (c0, c1, ..., ck)

    Returns:
        A GammaSet with the same points
    """
    h = _functional(h)
    negated = tuple(-c for c in h)
    cells = []
    for cell in s.cells:
        candidates = (
            (cell.equalities + (h,), cell.strict_inequalities),
            (cell.equalities, cell.strict_inequalities + (h,)),
            (cell.equalities, cell.strict_inequalities + (negated,)),
        )
        for equalities, strict in candidates:
            try:
                cells.append(GammaCell(s.ambient_dim, equalities, strict))
            except GammaError:
                continue
    return GammaSet(s.ambient_dim, tuple(cells), disjoint=True)


def pullback(s: GammaSet, matrix: Sequence[Sequence], offset: Sequence) -> GammaSet:
    """
    Preimage of a set along the affine map y -> matrix * y + offset.

    Args:
        s: Set in Q^k
        matrix: k rows of j rational entries
        offset: k rational entries

    Returns:
        GammaSet in Q^j (empty cells are dropped)
    """
    rows = [[_as_fraction(c) for c in row] for row in matrix]
    offset = [_as_fraction(c) for c in offset]
    j = len(rows[0]) if rows else 0

    def pull(func: Functional) -> Functional:
        const = func[0] + sum((c * b for c, b in zip(func[1:], offset)), Fraction(0))
        linear = [sum((func[i + 1] * rows[i][col] for i in range(len(rows))), Fraction(0))
                  for col in range(j)]
        return (const,) + tuple(linear)

    cells = []
    for cell in s.cells:
        try:
            cells.append(GammaCell(
                j,
                tuple(pull(e) for e in cell.equalities),
                tuple(pull(h) for h in cell.strict_inequalities),
            ))
        except GammaError:
            continue
    return GammaSet(j, tuple(cells), disjoint=True)


def lattice_points(s: GammaSet, m: int, limit: int = 200000) -> List[Tuple[Fraction, ...]]:
    """
    Enumerate the points of (1/m)Z^k lying in a bounded set.

    Args:
        s: A bounded GammaSet
        m: Positive integer denominator
        limit: Refuse enumerations larger than this box size

    Returns:
        Lexicographically sorted list of points
    """
    if m <= 0:
        raise GammaError("m must be positive")
    if not s.is_bounded:
        raise GammaError("infinite enumeration: the set is unbounded")

    found = set()
    for cell in s.cells:
        ranges = []
        for i in range(cell.ambient_dim):
            lo, hi = cell.coordinate_range(i)
            ranges.append(range(math.ceil(lo * m), math.floor(hi * m) + 1))
        size = math.prod(len(r) for r in ranges)
        if size > limit:
            raise GammaError(f"enumeration of {size} candidates exceeds limit {limit}")
        for numerators in itertools.product(*ranges):
            point = tuple(Fraction(n, m) for n in numerators)
            if cell.contains(point):
                found.add(point)
    return sorted(found)
