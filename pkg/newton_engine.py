"""
Newton Engine Module - Newton polygons of plane-curve polynomials.
Computes compact faces, face polynomials, nondegeneracy, level-one
normal-cone polytopes, the tropical data of the Thom-Sebastiani family
h(x, y) = y^N + sum x^m_i, and two independent numerical oracles.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from gamma_calc import GammaSet, MotivicError, make_cell, make_point
from groth_core import format_term

logger = logging.getLogger(__name__)

X, Y, Z = sympy.symbols("x y z")

Exponent = Tuple[int, int]


class NewtonError(MotivicError):
    """Custom exception for malformed Newton-polygon input."""
    pass


@dataclass(frozen=True)
class LaurentPoly:
    """
    A polynomial in x, y with rational coefficients, stored sorted.

    Attributes:
        terms: ((i, j), coefficient) pairs, nonzero coefficients only
    """

    terms: Tuple[Tuple[Exponent, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: Dict[Exponent, object]) -> "LaurentPoly":
        clean = {}
        for (i, j), c in coeffs.items():
            c = Fraction(c)
            if c:
                clean[(int(i), int(j))] = clean.get((int(i), int(j)), Fraction(0)) + c
        return cls(tuple(sorted((e, c) for e, c in clean.items() if c)))

    @classmethod
    def monomial(cls, i: int, j: int, coef=1) -> "LaurentPoly":
        return cls.from_dict({(i, j): coef})

    @classmethod
    def from_expr(cls, expr) -> "LaurentPoly":
        """Convert a sympy expression in x, y."""
        poly = sympy.Poly(sympy.expand(expr), X, Y)
        return cls.from_dict({
            m: Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q))
            for m, c in zip(poly.monoms(), poly.coeffs())
        })

    def to_expr(self) -> sympy.Expr:
        return sum(
            (sympy.Rational(c.numerator, c.denominator) * X ** i * Y ** j
             for (i, j), c in self.terms),
            sympy.Integer(0),
        )

    def as_dict(self) -> Dict[Exponent, Fraction]:
        return dict(self.terms)

    @property
    def support(self) -> List[Exponent]:
        return [e for e, _ in self.terms]

    def coefficient(self, exponent: Exponent) -> Fraction:
        return self.as_dict().get(tuple(exponent), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        merged = self.as_dict()
        for e, c in other.terms:
            merged[e] = merged.get(e, Fraction(0)) + c
        return LaurentPoly.from_dict(merged)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return LaurentPoly.from_dict({e: c * Fraction(other) for e, c in self.terms})
        product: Dict[Exponent, Fraction] = {}
        for (i1, j1), c1 in self.terms:
            for (i2, j2), c2 in other.terms:
                key = (i1 + i2, j1 + j2)
                product[key] = product.get(key, Fraction(0)) + c1 * c2
        return LaurentPoly.from_dict(product)

    def __pow__(self, n: int) -> "LaurentPoly":
        result = LaurentPoly.monomial(0, 0)
        for _ in range(n):
            result = result * self
        return result

    def variables(self) -> Tuple[bool, bool]:
        """Which of x, y actually occur."""
        return (any(i for (i, _), _ in self.terms), any(j for (_, j), _ in self.terms))

    def swap(self) -> "LaurentPoly":
        return LaurentPoly.from_dict({(j, i): c for (i, j), c in self.terms})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(self.terms, reverse=True)
        return "".join(format_term(e, c, i == 0) for i, (e, c) in enumerate(ordered))


@dataclass(frozen=True)
class Edge:
    """A compact edge from start (larger x-exponent) to end, with its inner normal."""

    start: Exponent
    end: Exponent
    normal: Tuple[int, int]
    level: int

    @property
    def lattice_length(self) -> int:
        return math.gcd(self.start[0] - self.end[0], self.end[1] - self.start[1])

    @property
    def level_one_point(self) -> Tuple[Fraction, Fraction]:
        return (Fraction(self.normal[0], self.level), Fraction(self.normal[1], self.level))

    def to_dict(self) -> Dict:
        return {"start": list(self.start), "end": list(self.end),
                "normal": list(self.normal), "level": self.level}


@dataclass(frozen=True)
class NewtonData:
    """
    Compact faces of the Newton polygon of f.

    Attributes:
        poly: The polynomial
        vertices: Vertices ordered from the x-axis side to the y-axis side
        edges: Edges between consecutive vertices
        convenient: Whether both axes carry a vertex
    """

    poly: LaurentPoly
    vertices: Tuple[Exponent, ...]
    edges: Tuple[Edge, ...]
    convenient: bool

    def face_poly(self, face) -> LaurentPoly:
        """Restriction of f to a vertex (exponent pair) or an Edge."""
        if isinstance(face, Edge):
            return LaurentPoly.from_dict({
                e: c for e, c in self.poly.terms
                if e[0] * face.normal[0] + e[1] * face.normal[1] == face.level
            })
        return LaurentPoly.from_dict({tuple(face): self.poly.coefficient(tuple(face))})

    def to_dict(self) -> Dict:
        return {
            "poly": str(self.poly),
            "vertices": [list(v) for v in self.vertices],
            "edges": [e.to_dict() for e in self.edges],
            "convenient": self.convenient,
            "face_polys": [str(self.face_poly(e)) for e in self.edges],
        }


def _cross(o: Exponent, a: Exponent, b: Exponent) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton(f: LaurentPoly) -> NewtonData:
    """
    Compact faces of conv(supp f + Q_{>=0}^2).

    Args:
        f: Polynomial with f(0, 0) = 0

    Returns:
        NewtonData with vertices ordered from the x-axis side
    """
    if f.is_zero():
        raise NewtonError("zero polynomial has no Newton polygon")
    if f.coefficient((0, 0)):
        raise NewtonError("nonzero constant term: f(0,0) must vanish")
    for i, j in f.support:
        if i < 0 or j < 0:
            raise NewtonError("negative exponents are not supported")

    points = sorted(set(f.support))
    lower: List[Exponent] = []
    for p in points:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    # Keep the part of the lower hull with strictly decreasing second coordinate.
    lowest = min(p[1] for p in lower)
    chain = []
    for p in lower:
        chain.append(p)
        if p[1] == lowest:
            break
    vertices = tuple(reversed(chain))

    edges = []
    for start, end in zip(vertices, vertices[1:]):
        di, dj = start[0] - end[0], end[1] - start[1]
        g = math.gcd(di, dj)
        normal = (dj // g, di // g)
        level = start[0] * normal[0] + start[1] * normal[1]
        edges.append(Edge(start, end, normal, level))

    convenient = vertices[0][1] == 0 and vertices[-1][0] == 0
    logger.debug("newton: vertices=%s convenient=%s", vertices, convenient)
    return NewtonData(f, vertices, tuple(edges), convenient)


def edge_polynomial(nd: NewtonData, edge: Edge) -> sympy.Poly:
    """
    One-variable reduction of an edge polynomial.

    Along the edge the exponents are start + k * d with d the primitive
    step, so f_E = x^start * P(z) with z = x^d; P has nonzero constant term.
    """
    n = edge.lattice_length
    step = ((edge.end[0] - edge.start[0]) // n, (edge.end[1] - edge.start[1]) // n)
    coeffs = []
    for k in range(n + 1):
        c = nd.poly.coefficient((edge.start[0] + k * step[0], edge.start[1] + k * step[1]))
        coeffs.append(sympy.Rational(c.numerator, c.denominator))
    return sympy.Poly(sum((c * Z ** k for k, c in enumerate(coeffs)), sympy.Integer(0)), Z)


def root_count(poly: sympy.Poly, field_name: str = "C") -> int:
    """Number of distinct nonzero roots over C or R."""
    reduced = poly.sqf_part()
    if field_name == "C":
        count = reduced.degree()
        return count - (1 if reduced.eval(0) == 0 else 0)
    count = reduced.count_roots()
    return count - (1 if reduced.eval(0) == 0 else 0)


def is_nondegenerate(f: LaurentPoly) -> bool:
    """
    Newton nondegeneracy: every edge polynomial reduces to a squarefree
    one-variable polynomial (vertex monomials never have torus critical points).
    """
    nd = newton(f)
    for edge in nd.edges:
        if not edge_polynomial(nd, edge).is_sqf:
            logger.info("degenerate edge %s -> %s", edge.start, edge.end)
            return False
    return True


def _face_argument(nd: NewtonData, face):
    if isinstance(face, Edge):
        return face
    if isinstance(face, tuple) and len(face) == 2 and face[0] == "edge":
        return nd.edges[face[1]]
    if isinstance(face, tuple) and len(face) == 2 and face[0] == "vertex":
        return tuple(face[1])
    return tuple(face)


def level_one_polytope(nd: NewtonData, face) -> GammaSet:
    """
    The level-one slice of the open normal cone of a compact face.

    Args:
        nd: Newton data
        face: A vertex (exponent pair, or ("vertex", v)), an Edge, or ("edge", index)

    Returns:
        GammaSet in Q^2: an open segment or ray for a vertex, a point for an edge
    """
    face = _face_argument(nd, face)
    if isinstance(face, Edge):
        return make_point(face.level_one_point)
    if face not in nd.vertices:
        raise NewtonError(f"{face} is not a vertex of the Newton polygon")
    p, q = face
    strict = [(0, 1, 0), (0, 0, 1)]
    for other in nd.vertices:
        if other != face:
            strict.append((0, other[0] - p, other[1] - q))
    return GammaSet(2, (make_cell(2, [(-1, p, q)], strict),))


@dataclass(frozen=True)
class TropicalData:
    """
    Tropical curve of h(x, y) = y^N + sum_i x^m_i in the positive quadrant.

    Attributes:
        apex: The common point (1/m_2, 1/N) of the three pieces
        rays: H1 (horizontal) and H2 (vertical) as GammaSets
        segment: H3, the open segment from the origin to the apex
        points: (alpha_i, beta_i) = (1/m_i, m_2/(N m_i))
        segments: L_i, open segments between consecutive points (the last ends at 0)
    """

    N: int
    m_list: Tuple[int, ...]
    apex: Tuple[Fraction, Fraction]
    rays: Tuple[GammaSet, GammaSet]
    segment: GammaSet
    points: Tuple[Tuple[Fraction, Fraction], ...]
    segments: Tuple[GammaSet, ...]
    diagnostics: Tuple[str, ...] = field(default=())

    def to_dict(self) -> Dict:
        return {
            "N": self.N, "m": list(self.m_list),
            "apex": [str(c) for c in self.apex],
            "rays": [str(r) for r in self.rays], "segment": str(self.segment),
            "points": [[str(a), str(b)] for a, b in self.points],
            "segments": [str(s) for s in self.segments],
            "diagnostics": list(self.diagnostics),
        }


def tropical_h(N: int, m_list: Sequence[int]) -> TropicalData:
    """
    Tropical data of the Thom-Sebastiani family.

    Args:
        N: Exponent of y
        m_list: [m_2, m_3, ..., m_l], strictly increasing

    Returns:
        TropicalData
    """
    m_list = tuple(int(m) for m in m_list)
    if not m_list:
        raise NewtonError("m_list must not be empty")
    if N <= 0 or any(m <= 0 for m in m_list):
        raise NewtonError("exponents must be positive")
    if any(a >= b for a, b in zip(m_list, m_list[1:])):
        raise NewtonError("m_list must be strictly increasing")

    diagnostics = []
    sequence = (m_list[0], N) + m_list[1:]
    for before, after in zip(sequence, sequence[1:]):
        if after <= before:
            message = (f"ordering ({', '.join(map(str, sequence))}) may violate the "
                       f"growth hypothesis at {before} -> {after}")
            logger.warning(message)
            diagnostics.append(message)

    m2 = m_list[0]
    apex = (Fraction(1, m2), Fraction(1, N))
    h1 = GammaSet(2, (make_cell(2, [(-apex[1], 0, 1)], [(-apex[0], 1, 0)]),))
    h2 = GammaSet(2, (make_cell(2, [(-apex[0], 1, 0)], [(-apex[1], 0, 1)]),))
    h3 = GammaSet(2, (make_cell(2, [(0, -m2, N)], [(0, 1, 0), (apex[0], -1, 0)]),))
    points = tuple((Fraction(1, m), Fraction(m2, N * m)) for m in m_list)
    segments = []
    for i, (alpha, _) in enumerate(points):
        lower = points[i + 1][0] if i + 1 < len(points) else Fraction(0)
        segments.append(GammaSet(2, (make_cell(
            2, [(0, -m2, N)], [(-lower, 1, 0), (alpha, -1, 0)]),)))
    return TropicalData(N, m_list, apex, (h1, h2), h3, points, tuple(segments),
                        tuple(diagnostics))


def _doubled_area(polygon: Sequence[Exponent]) -> int:
    total = 0
    for (x1, y1), (x2, y2) in zip(polygon, list(polygon[1:]) + [polygon[0]]):
        total += x1 * y2 - x2 * y1
    return abs(total)


def kouchnirenko_mu(f: LaurentPoly) -> int:
    """
    Milnor number of a convenient nondegenerate f: 2*Area - a - b + 1.
    """
    nd = newton(f)
    if not nd.convenient:
        raise NewtonError("Kouchnirenko's formula needs a convenient polynomial")
    if not is_nondegenerate(f):
        raise NewtonError("Kouchnirenko's formula needs a nondegenerate polynomial")
    a = nd.vertices[0][0]
    b = nd.vertices[-1][1]
    region = [(0, 0)] + list(nd.vertices)
    return _doubled_area(region) - a - b + 1


def _convex_hull(points: Sequence[Exponent]) -> List[Exponent]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _hull_edges(g: LaurentPoly) -> List[Tuple[Exponent, Exponent]]:
    hull = _convex_hull(g.support)
    return list(zip(hull, hull[1:] + hull[:1]))


def _segment_polynomial(g: LaurentPoly, start: Exponent, end: Exponent) -> sympy.Poly:
    n = math.gcd(abs(end[0] - start[0]), abs(end[1] - start[1]))
    step = ((end[0] - start[0]) // n, (end[1] - start[1]) // n)
    coeffs = g.as_dict()
    total = sympy.Integer(0)
    for k in range(n + 1):
        c = coeffs.get((start[0] + k * step[0], start[1] + k * step[1]), Fraction(0))
        total += sympy.Rational(c.numerator, c.denominator) * Z ** k
    return sympy.Poly(total, Z)


def torus_nondegenerate(g: LaurentPoly) -> bool:
    """
    Nondegeneracy of g for its full Newton polygon: squarefree edge
    polynomials and a smooth zero set in the torus.
    """
    for start, end in _hull_edges(g):
        if not _segment_polynomial(g, start, end).is_sqf:
            return False
    expr = g.to_expr()
    w = sympy.Symbol("w")
    basis = sympy.groebner(
        [expr, X * sympy.diff(expr, X), Y * sympy.diff(expr, Y), 1 - w * X * Y],
        X, Y, w, order="grevlex",
    )
    return list(basis.exprs) == [1]


def khovanskii_chi(g: LaurentPoly, check: bool = True) -> int:
    """
    Euler characteristic of {g = 0} in the complex torus: -2 * Area(Newton polygon of g).

    Args:
        g: Laurent polynomial
        check: Verify nondegeneracy first

    Returns:
        Integer Euler characteristic
    """
    if g.is_zero():
        raise NewtonError("zero polynomial")
    if check and not torus_nondegenerate(g):
        raise NewtonError(f"{g} is degenerate for its Newton polygon")
    hull = _convex_hull(g.support)
    if len(hull) < 3:
        return 0
    return -_doubled_area(hull)


def real_torus_chi(g: LaurentPoly) -> int:
    """
    Semialgebraic Euler characteristic of {g = 0} in (R^*)^2 for nondegenerate g.

    Compact ovals contribute 0 and every open arc -1; the arcs are counted by
    their ends, which sit over the real nonzero roots of the edge polynomials
    of the Newton polygon (two ends per transversal root).
    """
    if g.is_zero():
        raise NewtonError("zero polynomial")
    hull = _convex_hull(g.support)
    if len(hull) < 3:
        raise NewtonError("real Euler characteristic needs a two-dimensional Newton polygon")
    roots = 0
    for start, end in _hull_edges(g):
        poly = _segment_polynomial(g, start, end)
        if not poly.is_sqf:
            raise NewtonError(f"{g} is degenerate along the edge {start} -> {end}")
        roots += root_count(poly, "R")
    return -roots


def oval_count_oracle(f: LaurentPoly, sign: int = 1, radius: Fraction = Fraction(1, 1000)) -> int:
    """
    Independent oracle for the Euler characteristic of the closed real Milnor fiber.

    For a small radius r and much smaller level s*delta, every component of
    {f = s*delta} in the closed r-ball is an arc or an oval; ovals contribute
    0 and arcs 1, so the value is half the number of points on the circle of
    radius r. The circle is parametrized rationally and roots are counted exactly.
    """
    degree = max(i + j for i, j in f.support)
    delta = radius ** (2 * degree + 2)
    target = sympy.Rational(delta.numerator, delta.denominator) * (1 if sign > 0 else -1)
    s = sympy.Symbol("s")
    r = sympy.Rational(radius.numerator, radius.denominator)
    x_s = r * (1 - s ** 2) / (1 + s ** 2)
    y_s = r * 2 * s / (1 + s ** 2)
    numerator = sympy.numer(sympy.together(f.to_expr().subs({X: x_s, Y: y_s}) - target))
    poly = sympy.Poly(numerator, s)
    count = poly.sqf_part().count_roots()
    # The rational parametrization misses the point (-r, 0).
    if f.to_expr().subs({X: -r, Y: 0}) == target:
        count += 1
    if count % 2:
        raise NewtonError("odd number of boundary points; radius not small enough")
    return count // 2
