"""
Unit tests for the command-line front end.
Tests subcommand output, JSON round-trips and exit codes.
"""

import json

import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import EXIT_CHECK, EXIT_OK, EXIT_PARSE, EXIT_UNSUPPORTED, MilnorApplication, main
from groth_core import GrothElem
from milnor_calc import motivic_fiber_b
from utils import parse_polynomial
from zeta_engine import ZetaRat, motivic_zeta


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCommands:
    """Test suite for the text output of each subcommand."""

    def test_newton(self, capsys):
        code, out, _ = run(capsys, "newton", "x^2+y^3")
        assert code == EXIT_OK
        assert "vertices: (2, 0) (0, 3)" in out
        assert "mu=2" in out

    def test_leading_minus_after_separator(self, capsys):
        code, out, _ = run(capsys, "newton", "--", "-x^2+y^3")
        assert code == EXIT_OK
        assert "vertices: (2, 0) (0, 3)" in out

    def test_milnor_curve(self, capsys):
        code, out, _ = run(capsys, "milnor", "x^6+x^2*y^2+y^6", "--field", "R", "--retraction", "b")
        assert code == EXIT_OK
        assert "affine form: 2*[{x^6+x^2y^2=1}]" in out
        assert "[Gm]*[{x^2=1}]" in out

    def test_milnor_realize(self, capsys):
        code, out, _ = run(capsys, "milnor", "x^6+x^2*y^2+y^6", "--field", "R",
                           "--realize", "beta-mu2")
        assert code == EXIT_OK
        assert "beta-mu2 = u + 1" in out

    def test_milnor_checks(self, capsys):
        code, out, _ = run(capsys, "milnor", "x^6+x^2*y^2+y^6", "--field", "R", "--check")
        assert code == EXIT_OK
        assert "FAIL" not in out

    @pytest.mark.parametrize("poly", ["x^2*y^2", "x^3*y^3"])
    def test_tconvex(self, capsys, poly):
        code, out, _ = run(capsys, "tconvex", poly)
        closed = 4 if poly == "x^2*y^2" else 2
        assert code == EXIT_OK
        assert out.strip() == f"chi_closed={closed} chi_open={-closed} relation=OK"

    def test_tconvex_oracle(self, capsys):
        code, out, _ = run(capsys, "tconvex", "x^2+y^3", "--check")
        assert code == EXIT_OK
        assert "oval oracle=1 OK" in out

    def test_zeta_limit(self, capsys):
        code, out, _ = run(capsys, "zeta", "x", "--limit")
        assert code == EXIT_OK
        assert "-lim = 1" in out.splitlines()

    def test_zeta_check(self, capsys):
        code, out, _ = run(capsys, "zeta", "x^2+y^3", "--coeffs", "3", "--check")
        assert code == EXIT_OK
        assert "check limit: OK" in out

    def test_ts(self, capsys):
        code, out, _ = run(capsys, "ts", "--f", "x", "--g", "y", "--N", "5", "--m", "2,7", "--check")
        assert code == EXIT_OK
        assert "check euler: OK" in out

    def test_oracles(self, capsys):
        code, out, _ = run(capsys, "oracle", "chi", "x^2+y^3-1")
        assert code == EXIT_OK
        assert out.strip() == "chi=-6"
        code, out, _ = run(capsys, "oracle", "mu", "x^3+y^4")
        assert out.strip() == "mu=6"


class TestJson:
    """JSON output parses back to the same objects."""

    def test_milnor_round_trip(self, capsys):
        code, out, _ = run(capsys, "--json", "milnor", "x^2+y^3")
        payload = json.loads(out)
        assert code == EXIT_OK
        assert payload["kind"] == "MilnorFiber"
        expected = motivic_fiber_b(parse_polynomial("x^2+y^3"))
        assert GrothElem.from_dict(payload["class"]) == expected

    def test_zeta_round_trip(self, capsys):
        code, out, _ = run(capsys, "zeta", "x^3+y^2", "--json")
        payload = json.loads(out)
        assert ZetaRat.from_dict(payload["zeta"]) == motivic_zeta(parse_polynomial("x^3+y^2"))

    def test_output_is_deterministic(self, capsys):
        _, first, _ = run(capsys, "--json", "milnor", "x^6+x^2*y^2+y^6", "--field", "R")
        _, second, _ = run(capsys, "--json", "milnor", "x^6+x^2*y^2+y^6", "--field", "R")
        assert first == second


class TestExitCodes:
    """Test suite for error mapping."""

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "newton", "x^2+z")
        assert code == EXIT_PARSE
        assert "position 5" in err

    def test_bad_argument(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["milnor", "x", "--field", "Q"])
        assert excinfo.value.code == 2

    def test_unsupported_input(self, capsys):
        code, _, err = run(capsys, "milnor", "x^2+2*x*y+y^2")
        assert code == EXIT_UNSUPPORTED
        assert "degenerate" in err

    def test_constant_term(self, capsys):
        code, _, _ = run(capsys, "newton", "x+1")
        assert code == EXIT_UNSUPPORTED

    def test_failed_check(self, capsys, mocker):
        mocker.patch("app.check_open_closed", return_value=False)
        code, out, _ = run(capsys, "tconvex", "x^2*y^2")
        assert code == EXIT_CHECK
        assert "relation=FAIL" in out

    def test_invariant_breach(self, capsys, mocker):
        mocker.patch.object(MilnorApplication, "_cmd_newton", side_effect=AssertionError("bad"))
        code, _, err = run(capsys, "newton", "x^2+y^3")
        assert code == EXIT_CHECK
        assert "bad" in err


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
