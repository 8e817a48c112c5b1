"""
Unit tests for Zeta Engine Module.
Tests the closed form against lattice enumeration, the limit at infinity,
Hadamard products and Euler realizations.
"""

import pytest
import sympy

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from groth_core import GrothElem, kummer, theta
from milnor_calc import milnor_integral, motivic_fiber_b
from newton_engine import LaurentPoly
from zeta_engine import (
    T,
    ZetaError,
    ZetaRat,
    ZetaTerm,
    coeff,
    hadamard,
    hm_series,
    limit_T_inf,
    motivic_zeta,
    realize_zeta,
    topological_zeta,
    zeta_from_tensor,
)

X = LaurentPoly.monomial(1, 0)
CURVE = LaurentPoly.from_dict({(6, 0): 1, (2, 2): 1, (0, 6): 1})

SAMPLES = [
    (X, "C"),
    (LaurentPoly.from_dict({(2, 0): 1, (0, 3): 1}), "C"),
    (LaurentPoly.from_dict({(3, 0): 1, (0, 5): 1}), "C"),
    (LaurentPoly.monomial(2, 4), "C"),
    (LaurentPoly.monomial(3, 2), "R"),
    (CURVE, "R"),
]


def geometric(a: int, b: int, c: GrothElem = None) -> ZetaRat:
    return ZetaRat([ZetaTerm(c if c is not None else GrothElem.one(), 0, 0, ((a, b),))])


class TestZetaRat:
    """Test suite for the rational-function container."""

    def test_like_terms_merge(self):
        z = geometric(0, 1) + geometric(0, 1)
        (term,) = z.terms
        assert term.coeff == 2

    def test_cancellation(self):
        assert (geometric(0, 1) + -geometric(0, 1)).is_zero()

    def test_rejects_nonpositive_exponent(self):
        with pytest.raises(ZetaError):
            geometric(1, 0)

    def test_dict_round_trip(self):
        z = motivic_zeta(LaurentPoly.from_dict({(2, 0): 1, (0, 3): 1}))
        assert ZetaRat.from_dict(z.to_dict()) == z

    def test_coefficients_of_geometric(self):
        z = geometric(-1, 2, kummer(2))
        assert coeff(z, 4) == kummer(2).shift_A(-2)
        assert coeff(z, 3).is_zero()


class TestClosedForm:
    """The closed form agrees with enumeration and with the fiber."""

    @pytest.mark.parametrize("f,field_name", SAMPLES, ids=lambda v: str(v))
    def test_minus_limit_is_fiber(self, f, field_name):
        assert -limit_T_inf(motivic_zeta(f, field_name)) == motivic_fiber_b(f, field_name)

    @pytest.mark.parametrize("f,field_name", SAMPLES, ids=lambda v: str(v))
    def test_coefficients_match_enumeration(self, f, field_name):
        z = motivic_zeta(f, field_name)
        for m, value in hm_series(milnor_integral(f, field_name), 20).items():
            assert coeff(z, m) == theta(value), f"T^{m}"

    def test_smooth_point(self):
        z = zeta_from_tensor(milnor_integral(X))
        assert z == geometric(-1, 1)
        assert -limit_T_inf(z) == 1

    def test_limit_undefined(self):
        z = ZetaRat([ZetaTerm(GrothElem.one(), 0, 1, ())])
        with pytest.raises(ZetaError):
            limit_T_inf(z)

    def test_limit_drops_negative_powers(self):
        z = ZetaRat([ZetaTerm(GrothElem.one(), 0, -1, ()), ZetaTerm(GrothElem.one(), 2, 0, ())])
        assert limit_T_inf(z) == GrothElem.affine(2)


class TestHadamard:
    """Test suite for coefficientwise products."""

    def test_unit(self):
        assert hadamard(geometric(0, 1), geometric(0, 1)) == geometric(0, 1)

    def test_periods_combine(self):
        z = hadamard(geometric(-1, 2), geometric(0, 3))
        for m in range(1, 13):
            expected = GrothElem.affine(-m // 2) if m % 6 == 0 else GrothElem.zero()
            assert coeff(z, m) == expected

    def test_bare_term(self):
        bare = ZetaRat([ZetaTerm(kummer(3), 0, 2, ())])
        z = hadamard(bare, geometric(-1, 1))
        assert coeff(z, 2) == kummer(3).shift_A(-2)
        assert coeff(z, 1).is_zero()

    def test_two_atoms_unsupported(self):
        z = ZetaRat([ZetaTerm(GrothElem.one(), 0, 0, ((0, 1), (0, 2)))])
        with pytest.raises(ZetaError):
            hadamard(z, z)


class TestRealizations:
    """Test suite for Euler realizations of zeta functions."""

    def test_topological_smooth(self):
        assert sympy.simplify(topological_zeta(X) + T / (1 + T)) == 0

    def test_complex_realization_of_point(self):
        value = realize_zeta(zeta_from_tensor(milnor_integral(X)), "chi_complex")
        assert sympy.simplify(value - T / (1 - T)) == 0

    def test_unknown_realization(self):
        with pytest.raises(ZetaError):
            realize_zeta(geometric(0, 1), "hodge")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
