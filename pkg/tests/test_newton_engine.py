"""
Unit tests for Newton Engine Module.
Tests Newton polygons, nondegeneracy, tropical data and the numerical oracles.
"""

from fractions import Fraction

import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from gamma_calc import chi_b
from newton_engine import (
    LaurentPoly,
    NewtonError,
    is_nondegenerate,
    khovanskii_chi,
    kouchnirenko_mu,
    level_one_polytope,
    newton,
    oval_count_oracle,
    real_torus_chi,
    tropical_h,
)


def brieskorn(a: int, b: int) -> LaurentPoly:
    return LaurentPoly.from_dict({(a, 0): 1, (0, b): 1})


class TestLaurentPoly:
    """Test suite for LaurentPoly."""

    def test_str_is_deterministic(self):
        f = LaurentPoly.from_dict({(0, 6): 1, (2, 2): 1, (6, 0): 1})
        assert str(f) == "x^6+x^2y^2+y^6"

    def test_arithmetic(self):
        x, y = LaurentPoly.monomial(1, 0), LaurentPoly.monomial(0, 1)
        f = (x + y) ** 2
        assert f.coefficient((1, 1)) == 2
        assert (f - f).is_zero()

    def test_zero_terms_dropped(self):
        f = LaurentPoly.from_dict({(1, 0): 1, (0, 1): 0})
        assert f.support == [(1, 0)]

    def test_rational_coefficients(self):
        f = LaurentPoly.from_dict({(2, 0): Fraction(1, 2), (0, 3): -3})
        assert str(f) == "1/2*x^2-3*y^3"


class TestNewton:
    """Test suite for newton() and face data."""

    def test_cusp(self):
        nd = newton(brieskorn(2, 3))
        assert nd.vertices == ((2, 0), (0, 3))
        (edge,) = nd.edges
        assert edge.normal == (3, 2)
        assert edge.level == 6
        assert edge.level_one_point == (Fraction(1, 2), Fraction(1, 3))
        assert nd.convenient

    def test_interior_vertex(self):
        f = LaurentPoly.from_dict({(6, 0): 1, (2, 2): 1, (0, 6): 1})
        nd = newton(f)
        assert nd.vertices == ((6, 0), (2, 2), (0, 6))
        assert [e.normal for e in nd.edges] == [(1, 2), (2, 1)]
        assert str(nd.face_poly(nd.edges[0])) == "x^6+x^2y^2"

    def test_non_vertex_point_ignored(self):
        f = LaurentPoly.from_dict({(2, 0): 1, (7, 0): 1, (0, 5): 1})
        assert newton(f).vertices == ((2, 0), (0, 5))

    def test_monomial_not_convenient(self):
        nd = newton(LaurentPoly.monomial(3, 2))
        assert nd.vertices == ((3, 2),)
        assert nd.edges == ()
        assert not nd.convenient

    def test_constant_term_rejected(self):
        with pytest.raises(NewtonError):
            newton(LaurentPoly.from_dict({(0, 0): 1, (1, 0): 1}))

    def test_zero_rejected(self):
        with pytest.raises(NewtonError):
            newton(LaurentPoly())

    def test_nondegeneracy(self):
        assert is_nondegenerate(brieskorn(3, 4))
        square = LaurentPoly.from_dict({(2, 0): 1, (1, 1): 2, (0, 2): 1})
        assert not is_nondegenerate(square)

    def test_level_one_polytopes(self):
        nd = newton(brieskorn(2, 3))
        (edge,) = nd.edges
        assert level_one_polytope(nd, edge).cells[0].dimension == 0
        ray = level_one_polytope(nd, (2, 0))
        assert not ray.is_bounded
        with pytest.raises(NewtonError):
            level_one_polytope(nd, (1, 1))

    def test_interior_vertex_polytope_is_segment(self):
        f = LaurentPoly.from_dict({(6, 0): 1, (2, 2): 1, (0, 6): 1})
        segment = level_one_polytope(newton(f), (2, 2))
        assert segment.is_bounded
        assert chi_b(segment) == -1


class TestOracles:
    """Test suite for Kouchnirenko, Khovanskii and oval-count oracles."""

    @pytest.mark.parametrize("a,b", [(2, 2), (2, 3), (3, 4), (5, 5), (2, 7)])
    def test_brieskorn_mu(self, a, b):
        assert kouchnirenko_mu(brieskorn(a, b)) == (a - 1) * (b - 1)

    def test_mu_with_interior_vertex(self):
        f = LaurentPoly.from_dict({(6, 0): 1, (2, 2): 1, (0, 6): 1})
        assert kouchnirenko_mu(f) == 13

    def test_mu_needs_convenient(self):
        with pytest.raises(NewtonError):
            kouchnirenko_mu(LaurentPoly.monomial(2, 2))

    def test_khovanskii_line(self):
        g = LaurentPoly.from_dict({(1, 0): 1, (0, 1): 1, (0, 0): -1})
        assert khovanskii_chi(g) == -1

    def test_khovanskii_conic(self):
        g = LaurentPoly.from_dict({(2, 0): 1, (0, 2): 1, (0, 0): -1})
        assert khovanskii_chi(g) == -4

    def test_real_torus_line(self):
        g = LaurentPoly.from_dict({(1, 0): 1, (0, 1): 1, (0, 0): -1})
        assert real_torus_chi(g) == -3

    def test_oval_count(self):
        assert oval_count_oracle(brieskorn(2, 3)) == 1
        assert oval_count_oracle(brieskorn(2, 2)) == 0
        assert oval_count_oracle(LaurentPoly.from_dict({(2, 0): 1, (0, 2): -1})) == 2


class TestTropical:
    """Test suite for tropical_h."""

    def test_apex_and_points(self):
        trop = tropical_h(5, [2, 7])
        assert trop.apex == (Fraction(1, 2), Fraction(1, 5))
        assert trop.points == ((Fraction(1, 2), Fraction(1, 5)), (Fraction(1, 7), Fraction(2, 35)))
        assert len(trop.segments) == 2
        assert trop.diagnostics == ()

    def test_growth_diagnostic(self):
        trop = tropical_h(9, [2, 5])
        assert trop.diagnostics

    def test_rejects_non_increasing(self):
        with pytest.raises(NewtonError):
            tropical_h(5, [3, 3])

    def test_rejects_empty(self):
        with pytest.raises(NewtonError):
            tropical_h(5, [])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
