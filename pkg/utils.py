"""
Utility Module - Helper functions for the Milnor fiber engine.
Provides polynomial parsing, result formatting, JSON output and console helpers.
"""

import json
import re
import sys
from fractions import Fraction
from tokenize import TokenError
from typing import Any, Dict, List

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from config import MAX_EXPONENT
from gamma_calc import MotivicError
from newton_engine import X, Y, LaurentPoly

_ALLOWED = re.compile(r"[0-9xy+\-*^/().\s]")
_TRANSFORMATIONS = standard_transformations + (implicit_multiplication_application, convert_xor)


class ParseError(MotivicError):
    """Custom exception for malformed polynomial or parameter text."""
    pass


def _check_powers(expr: sympy.Expr):
    """Reject large exponents before anything is expanded."""
    for power in expr.atoms(sympy.Pow):
        exponent = power.exp
        if exponent.is_Number and abs(exponent) > MAX_EXPONENT:
            raise ParseError(f"exponent {exponent} exceeds MAX_EXPONENT={MAX_EXPONENT}")


def parse_polynomial(text: str) -> LaurentPoly:
    """
    Parse a polynomial in x and y with rational coefficients.

    Accepts '^' or '**' for powers and implicit products such as "2x^2y";
    any whitespace (tabs and newlines included) is ignored.

    Args:
        text: Polynomial text, e.g. "x^6 + x^2*y^2 + y^6"

    Returns:
        LaurentPoly

    Raises:
        ParseError: With the 1-based position of the first illegal character
    """
    if not text or not text.strip():
        raise ParseError("empty polynomial")
    for position, char in enumerate(text, start=1):
        if not _ALLOWED.fullmatch(char):
            raise ParseError(f"unexpected character {char!r} at position {position}")
    try:
        expr = parse_expr(" ".join(text.split()), local_dict={"x": X, "y": Y},
                          transformations=_TRANSFORMATIONS)
        _check_powers(expr)
        poly = sympy.Poly(sympy.expand(expr), X, Y)
    except (SyntaxError, TokenError, TypeError, sympy.PolynomialError, sympy.SympifyError) as e:
        raise ParseError(f"cannot parse {text!r} as a polynomial in x, y: {e}") from e
    if not poly.domain.is_QQ and not poly.domain.is_ZZ:
        raise ParseError(f"coefficients of {text!r} must be rational")
    for i, j in poly.monoms():
        if i > MAX_EXPONENT or j > MAX_EXPONENT:
            raise ParseError(f"exponent exceeds MAX_EXPONENT={MAX_EXPONENT}")
    return LaurentPoly.from_expr(poly.as_expr())


def parse_int_list(text: str) -> List[int]:
    """
    Parse a comma-separated list of positive integers such as "3,7,11".
    """
    values = []
    for position, item in enumerate(text.split(","), start=1):
        item = item.strip()
        if not item.isdigit() or int(item) <= 0:
            raise ParseError(f"entry {position} of {text!r} is not a positive integer")
        values.append(int(item))
    if not values:
        raise ParseError("empty list")
    return values


def _json_default(value: Any):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, sympy.Basic):
        return str(value)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def to_json(payload: Dict) -> str:
    """Serialize a result payload; Fractions and sympy values become strings."""
    return json.dumps(payload, indent=2, ensure_ascii=False, default=_json_default)


def format_table(rows: List[Dict], columns: List[str]) -> str:
    """
    Render dictionaries as a fixed-width text table.

    Args:
        rows: One dictionary per row
        columns: Keys to show, in order

    Returns:
        Table string
    """
    cells = [[str(row.get(c, "")) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    return "\n".join(lines)


def print_colored(text: str, color: str = "white", file=None):
    """
    Print colored text to console (if supported).

    Args:
        text: Text to print
        color: Color name
        file: Stream (default stdout)
    """
    colors = {
        "red": "\033[91m",
        "green": "\033[92m",
        "yellow": "\033[93m",
        "blue": "\033[94m",
        "cyan": "\033[96m",
        "white": "\033[97m",
        "reset": "\033[0m"
    }
    color_code = colors.get(color.lower(), colors["white"])
    print(f"{color_code}{text}{colors['reset']}", file=file or sys.stdout)

