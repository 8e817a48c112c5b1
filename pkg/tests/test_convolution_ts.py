"""
Unit tests for Convolution Module.
Tests diagonal classes, the convolution operator and the Thom-Sebastiani assembly.
"""

from fractions import Fraction

import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from convolution_ts import (
    DiagClass,
    convolve,
    psi,
    ts_assemble,
    ts_direct,
    ts_polynomial,
    ts_real,
    ts_terms,
    ts_two,
    unit_class,
)
from groth_core import GrothElem, UnsupportedInputError, kummer
from milnor_calc import motivic_fiber_b
from newton_engine import LaurentPoly, NewtonError, kouchnirenko_mu
from realize_maps import realize_complex

X = LaurentPoly.monomial(1, 0)
Y = LaurentPoly.monomial(0, 1)


def power_family(a: int) -> DiagClass:
    return DiagClass(GrothElem.one(), ((a,),), (Fraction(1, a),), (Fraction(1),))


class TestDiagClass:
    """Test suite for DiagClass validation."""

    def test_unit(self):
        unit = unit_class()
        assert unit.length == 1
        assert unit.levels == (Fraction(1),)
        assert unit.pi_weights == (1,)

    def test_theta_profile_enforced(self):
        with pytest.raises(UnsupportedInputError):
            DiagClass(GrothElem.one(), ((1, 0), (0, 1)), (1, 1), (Fraction(1, 2), 1))

    def test_levels_proportional(self):
        with pytest.raises(UnsupportedInputError):
            DiagClass(GrothElem.one(), ((1, 0), (0, 1)), (1, 2), (1, 1))

    def test_dimension_mismatch(self):
        with pytest.raises(UnsupportedInputError):
            DiagClass(GrothElem.one(), ((1, 0),), (1,), (1,))

    def test_to_dict(self):
        data = power_family(3).to_dict()
        assert data["pi_weights"] == [3]
        assert data["vals"] == ["1/3"]


class TestConvolution:
    """Test suite for psi and convolve."""

    @pytest.mark.parametrize("a", [1, 2, 3, 5])
    def test_unit_identity(self, a):
        assert convolve(power_family(a), unit_class()) == kummer(a)

    def test_psi_of_zero_base(self):
        diag = DiagClass(GrothElem.zero(), ((1, 0), (0, 1)), (1, 1), (1, 1))
        assert psi(diag).is_zero()

    def test_psi_needs_two_components(self):
        with pytest.raises(UnsupportedInputError):
            psi(unit_class())

    def test_convolve_shape(self):
        with pytest.raises(UnsupportedInputError):
            convolve(DiagClass(GrothElem.one(), ((1, 0), (0, 1)), (1, 1), (1, 1)), unit_class())

    def test_three_step_reduction(self):
        """The antidiagonal of y^5 = -x^2 carries x^7 as a 35-fold torsor."""
        diag = DiagClass(GrothElem.one(), ((0, 5), (2, 0), (7, 0)),
                         (Fraction(1, 7), Fraction(2, 35)),
                         (Fraction(2, 7), Fraction(2, 7), Fraction(1)))
        assert psi(diag) == kummer(35)


class TestThomSebastiani:
    """Test suite for the separate-variable formula and its assembly."""

    @pytest.mark.parametrize("a,b", [(1, 1), (2, 3), (2, 2), (3, 5), (4, 4), (5, 5)])
    def test_two_functions_match_fiber(self, a, b):
        f, g = X ** a, Y ** b
        assert ts_two(f, g) == motivic_fiber_b(f + g)
        assert realize_complex(ts_two(f, g)) == a + b - a * b

    def test_smooth_sum_is_point(self):
        assert ts_two(X, Y) == 1

    @pytest.mark.parametrize("a,b", [(2, 3), (3, 4), (5, 5)])
    def test_mu_multiplicativity(self, a, b):
        assert realize_complex(ts_two(X ** a, Y ** b)) == 1 - kouchnirenko_mu(X ** a + Y ** b)

    def test_shared_variable_rejected(self):
        with pytest.raises(UnsupportedInputError):
            ts_two(X ** 2, X ** 3)

    def test_non_monomial_rejected(self):
        with pytest.raises(UnsupportedInputError):
            ts_two(X + Y, Y)

    @pytest.mark.parametrize("m,N", [(2, 5), (3, 7), (2, 9)])
    def test_assembly_two_terms(self, m, N):
        assembled = ts_assemble(X, Y, N, [m])
        direct = ts_direct(X, Y, N, [m])
        assert assembled == direct
        assert realize_complex(assembled) == realize_complex(direct)

    @pytest.mark.parametrize("N,m_list", [(5, [2, 7]), (7, [3, 8]), (9, [2, 11, 13])])
    def test_assembly_euler_level(self, N, m_list):
        assert realize_complex(ts_assemble(X, Y, N, m_list)) == realize_complex(
            ts_direct(X, Y, N, m_list))

    def test_term_labels(self):
        labels = [t.label for t in ts_terms(X, Y, 5, [2, 7])]
        assert labels == ["S_g^N([Z_f])", "S_f^2", "S_f^7([Z_g^N+f_(7)])",
                          "-Psi_theta(2)", "-Psi_theta(3)"]

    def test_torsor_term(self):
        terms = {t.label: t.value for t in ts_terms(X, Y, 5, [2, 7])}
        assert realize_complex(terms["S_f^7([Z_g^N+f_(7)])"]) == 35

    def test_polynomial(self):
        assert str(ts_polynomial(X, Y, 5, [2, 7])) == "x^7+x^2+y^5"

    def test_real_specialization(self):
        real = ts_real(X, Y, 5, [2])
        assert all(atom.field == "R" for atom in real.atoms())

    def test_bad_m_list(self):
        with pytest.raises(NewtonError):
            ts_assemble(X, Y, 5, [7, 2])

    def test_unit_with_unit(self):
        assert convolve(unit_class(), unit_class()) == 1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
