"""
Unit tests for Utility Module.
"""

import json
from fractions import Fraction

import pytest
import sympy

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import MAX_EXPONENT
from newton_engine import LaurentPoly
from utils import ParseError, format_table, parse_int_list, parse_polynomial, to_json


class TestParsePolynomial:
    """Test suite for polynomial parsing."""

    def test_caret_and_implicit_product(self):
        f = parse_polynomial("x^6 + x^2y^2 + y^6")
        assert f == LaurentPoly.from_dict({(6, 0): 1, (2, 2): 1, (0, 6): 1})

    def test_double_star(self):
        assert parse_polynomial("x**2+y**3") == parse_polynomial("x^2+y^3")

    def test_rational_coefficients(self):
        f = parse_polynomial("x^2/2 - 3*y")
        assert f.coefficient((2, 0)) == Fraction(1, 2)
        assert f.coefficient((0, 1)) == -3

    def test_illegal_character_position(self):
        with pytest.raises(ParseError, match="position 4"):
            parse_polynomial("x^2$y")

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_polynomial("   ")

    def test_unbalanced(self):
        with pytest.raises(ParseError):
            parse_polynomial("(x+y")

    def test_exponent_limit(self):
        with pytest.raises(ParseError, match="MAX_EXPONENT"):
            parse_polynomial(f"x^{MAX_EXPONENT + 1}+y^2")

    def test_exponent_limit_before_expansion(self):
        with pytest.raises(ParseError, match="MAX_EXPONENT"):
            parse_polynomial("(x+y)^100000")

    def test_tabs_and_newlines(self):
        assert parse_polynomial("x^2\t+\ny^3") == parse_polynomial("x^2+y^3")


class TestParseIntList:
    """Test suite for comma-separated parameters."""

    def test_valid(self):
        assert parse_int_list("3, 7,11") == [3, 7, 11]

    @pytest.mark.parametrize("text", ["", "3,,7", "3,-7", "a"])
    def test_invalid(self, text):
        with pytest.raises(ParseError):
            parse_int_list(text)


class TestFormatting:
    """Test suite for JSON and table output."""

    def test_json_fraction_and_sympy(self):
        data = json.loads(to_json({"v": Fraction(1, 3), "s": sympy.Symbol("u") + 1}))
        assert data == {"v": "1/3", "s": "u + 1"}

    def test_json_rejects_unknown(self):
        with pytest.raises(TypeError):
            to_json({"v": object()})

    def test_table(self):
        table = format_table([{"label": "A", "k": 1}, {"label": "B'", "k": 12}], ["label", "k"])
        lines = table.splitlines()
        assert lines[0].split() == ["label", "k"]
        assert lines[3].split() == ["B'", "12"]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
