"""
Motivic Milnor Fiber Engine - Main Entry Point.
Command-line front end: parses polynomials, runs the pipeline and prints
deterministic text or JSON. Results go to stdout, diagnostics to stderr.
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional, Tuple

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import MM_LOG_LEVEL, ZETA_CHECK_ORDER
from convolution_ts import ts_assemble, ts_direct, ts_polynomial, ts_terms
from gamma_calc import MotivicError
from groth_core import theta
from milnor_calc import (
    affine_curve_class,
    check_open_closed,
    forgetful_descent_check,
    milnor_integral,
    motivic_fiber_b,
    motivic_fiber_g,
    piece_table,
    sign_symmetry_check,
    tconvex_chi,
)
from newton_engine import (
    is_nondegenerate,
    khovanskii_chi,
    kouchnirenko_mu,
    newton,
    oval_count_oracle,
)
from realize_maps import beta, beta_mu2, realize_complex, realize_real
from utils import (
    ParseError,
    format_table,
    parse_int_list,
    parse_polynomial,
    print_colored,
    to_json,
)
from zeta_engine import coeff, hm_series, limit_T_inf, motivic_zeta, topological_zeta

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_CHECK = 4

SIGNS = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}

Result = Tuple[Dict, List[str], bool]


def build_parser() -> argparse.ArgumentParser:
    """Command-line interface: one subcommand per pipeline stage."""
    parser = argparse.ArgumentParser(
        prog="milnor", description="Exact motivic Milnor fibers of plane-curve singularities")
    parser.add_argument("--json", action="store_true", help="Print machine-readable JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_poly(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("poly", help='Polynomial in x, y, e.g. "x^6+x^2*y^2+y^6"; put "--" before '
                                    'one that starts with a minus sign')
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return p

    with_poly("newton", "Newton polygon, faces and nondegeneracy")

    p = with_poly("milnor", "RES x Gamma decomposition and motivic Milnor fiber")
    p.add_argument("--field", choices=["C", "R"], default="C")
    p.add_argument("--sign", choices=sorted(SIGNS), default="+")
    p.add_argument("--retraction", choices=["b", "g"], default="b")
    p.add_argument("--realize", choices=["none", "chi", "beta", "beta-mu2"], default="none")
    p.add_argument("--check", action="store_true", help="Run the consistency checks")

    p = with_poly("zeta", "Motivic zeta function")
    p.add_argument("--field", choices=["C", "R"], default="C")
    p.add_argument("--sign", choices=sorted(SIGNS), default="+")
    p.add_argument("--coeffs", type=int, default=0, metavar="M", help="Print coefficients 1..M")
    p.add_argument("--limit", action="store_true", help="Print minus the limit at T = oo")
    p.add_argument("--topological", action="store_true", help="Print the real Euler realization")
    p.add_argument("--check", action="store_true")

    p = sub.add_parser("ts", help="Thom-Sebastiani assembly for h = g^N + sum f^m_i")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", required=True, help="Comma-separated m_2,...,m_l")
    p.add_argument("--check", action="store_true")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    p = with_poly("tconvex", "Closed and open real Euler characteristics")
    p.add_argument("--sign", choices=sorted(SIGNS), default="+")
    p.add_argument("--check", action="store_true", help="Compare with the oval-count oracle")

    p = sub.add_parser("oracle", help="Independent numerical oracles")
    p.add_argument("kind", choices=["mu", "chi", "oval"],
                   help="mu: Kouchnirenko number; chi: Euler characteristic of {g=0} in the torus; "
                        "oval: closed real fiber count")
    p.add_argument("poly", help='Polynomial in x, y; put "--" before one that starts with a minus sign')
    p.add_argument("--sign", choices=sorted(SIGNS), default="+")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    return parser


class MilnorApplication:
    """
    Dispatches parsed arguments to the pipeline and renders the results.
    Each command returns (payload, text lines, checks passed).
    """

    def run(self, argv: Optional[List[str]] = None) -> int:
        args = build_parser().parse_args(argv)
        payload, lines, ok = self.execute(args)
        if args.json:
            print(to_json(payload))
        else:
            for line in lines:
                print(line)
        if not ok:
            logger.error("%s: check failed", args.command)
            return EXIT_CHECK
        return EXIT_OK

    def execute(self, args: argparse.Namespace) -> Result:
        """Run one parsed command without printing."""
        logger.debug("running %s", args.command)
        return getattr(self, f"_cmd_{args.command}")(args)

    def _cmd_newton(self, args) -> Result:
        f = parse_polynomial(args.poly)
        nd = newton(f)
        nondegenerate = is_nondegenerate(f)
        payload = {"kind": "NewtonData", "poly": str(f), "nondegenerate": nondegenerate,
                   **nd.to_dict()}
        lines = [f"f = {f}", f"vertices: {' '.join(map(str, nd.vertices))}"]
        for edge in nd.edges:
            lines.append(f"edge {edge.start} -> {edge.end}  normal={edge.normal}  "
                         f"face: {nd.face_poly(edge)}")
        lines.append(f"convenient={nd.convenient} nondegenerate={nondegenerate}")
        if nd.convenient and nondegenerate:
            mu = kouchnirenko_mu(f)
            payload["mu"] = mu
            lines.append(f"mu={mu}")
        return payload, lines, True

    def _realization(self, e, field_name: str, which: str):
        if which == "chi":
            return realize_complex(e) if field_name == "C" else realize_real(e)
        if which == "beta":
            return beta(e)
        if which == "beta-mu2":
            return beta_mu2(e)
        return None

    def _cmd_milnor(self, args) -> Result:
        f = parse_polynomial(args.poly)
        sign = SIGNS[args.sign]
        fiber = motivic_fiber_b if args.retraction == "b" else motivic_fiber_g
        e = fiber(f, args.field, sign)
        display = affine_curve_class(e)
        rows = [row.to_dict() for row in piece_table(f, args.field, sign)]
        payload = {"kind": "MilnorFiber", "poly": str(f), "field": args.field, "sign": sign,
                   "retraction": args.retraction, "pieces": rows,
                   "class": e.to_dict(), "display": display.to_dict()}
        lines = [format_table(rows, ["label", "res", "gamma", "k", "l", "chi_b_part", "chi_g_part"]),
                 "",
                 f"S_{args.retraction} = {e.describe(show_actions=True)}",
                 f"affine form: {display.describe(show_actions=True)}"]
        if args.realize != "none":
            value = self._realization(e, args.field, args.realize)
            payload["realization"] = {"kind": args.realize, "value": str(value)}
            lines.append(f"{args.realize} = {value}")

        ok = True
        if args.check:
            checks = {"limit": -limit_T_inf(motivic_zeta(f, args.field, sign))
                      == motivic_fiber_b(f, args.field, sign)}
            if args.field == "R":
                checks["sign_symmetry"] = sign_symmetry_check(f, "R")
                checks["open_closed"] = check_open_closed(f, sign)
                checks["forgetful_descent"] = forgetful_descent_check(f, sign)
            payload["checks"] = checks
            lines += [f"check {name}: {'OK' if passed else 'FAIL'}" for name, passed in checks.items()]
            ok = all(checks.values())
        return payload, lines, ok

    def _cmd_zeta(self, args) -> Result:
        f = parse_polynomial(args.poly)
        sign = SIGNS[args.sign]
        z = motivic_zeta(f, args.field, sign)
        payload = {"kind": "Zeta", "poly": str(f), "field": args.field, "sign": sign,
                   "zeta": z.to_dict()}
        lines = [f"Z(T) = {z}"]
        if args.coeffs > 0:
            coefficients = {m: coeff(z, m) for m in range(1, args.coeffs + 1)}
            payload["coefficients"] = {str(m): c.to_dict() for m, c in coefficients.items()}
            lines += [f"  T^{m}: {c.describe(show_actions=True)}" for m, c in coefficients.items()]
        if args.limit:
            value = -limit_T_inf(z)
            payload["minus_limit"] = value.to_dict()
            lines.append(f"-lim = {value.describe(show_actions=True)}")
        if args.topological:
            topo = topological_zeta(f, sign)
            payload["topological"] = str(topo)
            lines.append(f"Z_top(T) = {topo}")

        ok = True
        if args.check:
            series = hm_series(milnor_integral(f, args.field, sign), ZETA_CHECK_ORDER)
            coefficients_ok = all(coeff(z, m) == theta(value) for m, value in series.items())
            limit_ok = -limit_T_inf(z) == motivic_fiber_b(f, args.field, sign)
            payload["checks"] = {"coefficients": coefficients_ok, "limit": limit_ok}
            lines.append(f"check coefficients to order {ZETA_CHECK_ORDER}: "
                         f"{'OK' if coefficients_ok else 'FAIL'}")
            lines.append(f"check limit: {'OK' if limit_ok else 'FAIL'}")
            ok = coefficients_ok and limit_ok
        return payload, lines, ok

    def _cmd_ts(self, args) -> Result:
        f, g = parse_polynomial(args.f), parse_polynomial(args.g)
        m_list = parse_int_list(args.m)
        terms = ts_terms(f, g, args.N, m_list)
        assembled = ts_assemble(f, g, args.N, m_list)
        direct = ts_direct(f, g, args.N, m_list)
        chi_assembled, chi_direct = realize_complex(assembled), realize_complex(direct)
        h = ts_polynomial(f, g, args.N, m_list)
        payload = {"kind": "ThomSebastiani", "h": str(h), "N": args.N, "m": m_list,
                   "terms": [t.to_dict() for t in terms], "assembled": assembled.to_dict(),
                   "direct": direct.to_dict(), "chi_assembled": chi_assembled,
                   "chi_direct": chi_direct}
        lines = [f"h = {h}"]
        lines += [f"  {t.label}: {t.value.describe()}" for t in terms]
        lines += [f"assembled: {assembled.describe(show_actions=True)}",
                  f"direct:    {direct.describe(show_actions=True)}",
                  f"chi_assembled={chi_assembled} chi_direct={chi_direct}"]
        ok = True
        if args.check:
            ok = chi_assembled == chi_direct
            lines.append(f"check euler: {'OK' if ok else 'FAIL'}")
        return payload, lines, ok

    def _cmd_tconvex(self, args) -> Result:
        f = parse_polynomial(args.poly)
        sign = SIGNS[args.sign]
        closed = tconvex_chi(f, "closed", sign)
        opened = tconvex_chi(f, "open", sign)
        relation = check_open_closed(f, sign)
        payload = {"kind": "TConvex", "poly": str(f), "sign": sign, "chi_closed": closed,
                   "chi_open": opened, "relation": relation}
        lines = [f"chi_closed={closed} chi_open={opened} relation={'OK' if relation else 'FAIL'}"]
        ok = relation
        if args.check:
            oracle = oval_count_oracle(f, sign)
            payload["oval_oracle"] = oracle
            lines.append(f"oval oracle={oracle} {'OK' if oracle == closed else 'FAIL'}")
            ok = ok and oracle == closed
        return payload, lines, ok

    def _cmd_oracle(self, args) -> Result:
        f = parse_polynomial(args.poly)
        sign = SIGNS[args.sign]
        if args.kind == "mu":
            mu = kouchnirenko_mu(f)
            return {"kind": "Oracle", "oracle": "mu", "poly": str(f), "value": mu}, [f"mu={mu}"], True
        if args.kind == "chi":
            chi = khovanskii_chi(f)
            return {"kind": "Oracle", "oracle": "chi", "poly": str(f), "value": chi}, [f"chi={chi}"], True
        oracle = oval_count_oracle(f, sign)
        closed = tconvex_chi(f, "closed", sign)
        ok = oracle == closed
        payload = {"kind": "Oracle", "oracle": "oval", "poly": str(f), "sign": sign,
                   "value": oracle, "tconvex": closed, "agree": ok}
        return payload, [f"oval={oracle} tconvex={closed} {'OK' if ok else 'FAIL'}"], ok


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    logging.basicConfig(level=MM_LOG_LEVEL.upper(), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    app = MilnorApplication()
    try:
        return app.run(argv)
    except ParseError as e:
        print_colored(f"parse error: {e}", "red", file=sys.stderr)
        return EXIT_PARSE
    except MotivicError as e:
        print_colored(f"error: {e}", "yellow", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except AssertionError as e:
        print_colored(f"internal invariant breached: {e}", "red", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
