"""Command-line front end: JSON on stdout, a short summary on stderr."""
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

import mpmath

from . import acceptance
from .config import Config, ConfigError
from .contmat import e_matrix, quad_poly
from .experiment import (
    BudgetExceeded,
    InsufficientPoints,
    degeneracy_scan,
    harvest_and_certify,
    pell_bijection_report,
)
from .factor import FactorProblem, fiber_solve, vbar_solve
from .gauss import PreconditionError, m_set, nicf_expand_gauss
from .hurwitz import StepBudgetExceeded, nicf_expand
from .literals import ParseError, parse_matrix, parse_pcf, parse_quad, parse_ring, parse_value
from .pcf import DivisionByZeroTail, NonConvergent, evaluate
from .pell import FPError, FPPoint, NoGenerator, fp_stream, fundamental_pell
from .ring import RingError, format_elem, format_value, json_scalar, sort_key

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


@contextmanager
def _usage():
    """Input parsing: any value error is a usage error."""
    try:
        yield
    except (ParseError, RingError, ConfigError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


class Output:
    def __init__(self, path: str | None):
        self.fh = open(path, "w", encoding="utf-8") if path else sys.stdout

    def json(self, obj):
        self.fh.write(json.dumps(obj) + "\n")

    def close(self):
        if self.fh is not sys.stdout:
            self.fh.close()


def _say(msg: str):
    print(msg, file=sys.stderr)


def _ring(args, cfg: Config):
    with _usage():
        return parse_ring(args.ring or cfg.ring)


def _numeric_str(z) -> str:
    re, im = mpmath.nstr(z.real, 40), z.imag
    if not im:
        return re
    sign = "-" if im < 0 else "+"
    return f"{re}{sign}{mpmath.nstr(abs(im), 40)}*I"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_eval(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        p = parse_pcf(args.pcf, ring)
    res = {"pcf": str(p), "quad": quad_poly(p).to_json()}
    try:
        v = evaluate(p, args.embedding, args.max_periods)
    except (NonConvergent, DivisionByZeroTail) as exc:
        res.update(value_exact=None, value_numeric=None, radius=None, converged=False, error=str(exc))
        out.json(res)
        _say(f"{p}: {exc}")
        return EXIT_FAIL
    res.update(
        value_exact=None if v.exact is None else format_value(v.exact),
        value_numeric=_numeric_str(v.numeric),
        radius=mpmath.nstr(v.radius, 5),
        converged=v.converged,
        periods=v.periods,
    )
    out.json(res)
    _say(f"{p} = {res['value_exact']} (converged: {v.converged}, {v.periods} periods)")
    return EXIT_OK if v.converged else EXIT_FAIL


def cmd_quad(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        p = parse_pcf(args.pcf, ring)
    q = quad_poly(p)
    out.json({"pcf": str(p), "quad": q.to_json(), "e_matrix": e_matrix(p).to_json()})
    _say(f"Quad{p} = {q}")
    return EXIT_OK


def cmd_expand(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        if str(ring) != "Z":
            raise ValueError("expand works over Z; use expand-gauss for imaginary quadratic orders")
        x = parse_value(args.value, ring)
    try:
        e = nicf_expand(x, args.max_steps)
    except StepBudgetExceeded as exc:
        _say(str(exc))
        return EXIT_BUDGET
    out.json(e.to_json())
    _say(f"{args.value}: preperiod {len(e.preperiod)}, period {len(e.period)}")
    return EXIT_OK


def cmd_expand_gauss(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        x = parse_value(args.value, ring)
        e = nicf_expand_gauss(x, ring, args.max_steps)
    out.json(e.to_json())
    _say(f"{args.value}: {e.status}, avoids M: {e.avoids_m}")
    return EXIT_BUDGET if e.status == "incomplete" else EXIT_OK


def cmd_mset(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        M = m_set(ring, args.bound)
    elems = sorted(M, key=lambda c: (c.norm(), sort_key(c)))
    out.json({"ring": str(ring), "bound": args.bound, "size": len(elems), "elements": [format_elem(c) for c in elems]})
    _say(f"|M| = {len(elems)} over {ring}")
    return EXIT_OK


def cmd_pell(args, cfg, out) -> int:
    with _usage():
        c, d, n = fundamental_pell(args.alpha)
    out.json({"alpha": args.alpha, "unit": f"{d}+{c}*sqrt({args.alpha})", "c": c, "d": d, "norm": n})
    _say(f"fundamental unit {d}+{c}*sqrt({args.alpha}), norm {n}")
    return EXIT_OK


def _fp_json(P: FPPoint) -> dict:
    return {"fp": str(P), "conic": [json_scalar(x) for x in P.conic()], "height": P.height()}


def cmd_fp_points(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        Q = parse_quad(args.quad, ring)
    try:
        pts = fp_stream(Q, args.k, ring, args.count, args.unit_gen or cfg.unit_generators)
    except (NoGenerator, FPError) as exc:
        _say(str(exc))
        return EXIT_USAGE
    for P in pts:
        out.json(_fp_json(P))
    _say(f"{len(pts)} points")
    return EXIT_OK


def cmd_factor(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        prob = FactorProblem(parse_matrix(args.matrix, ring), args.N, args.k, args.H, ring)
    sols = vbar_solve(prob, jobs=args.jobs or cfg.jobs)
    for s in sols:
        out.json(str(s))
    _say(f"{len(sols)} solutions of height <= {args.H}" + ("" if sols else "; existence beyond the bound unknown"))
    return EXIT_OK


def cmd_fiber(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        Q = parse_quad(args.quad, ring)
        a, b, c, d = parse_matrix(args.fp, ring).entries()
        P = FPPoint(a, b, c, d, args.k % 2)
        if not P.satisfies(Q):
            raise ValueError(f"{P} is not on the Fermat-Pell curve of {Q} for k = {args.k}")
    sols = fiber_solve(P, Q, args.N, args.k, args.H, jobs=args.jobs or cfg.jobs)
    for p in sols:
        out.json(str(p))
    _say(f"{len(sols)} fiber points of height <= {args.H}")
    return EXIT_OK


def cmd_scan(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        Q = parse_quad(args.quad, ring)
        mset = m_set(ring, args.mset_bound) if ring.kind == "imaginary" and args.mset_bound else None
    report = degeneracy_scan(
        Q, args.N, args.k, args.H, ring, mset, cfg.node_limit, cfg.time_limit, args.jobs or cfg.jobs
    )
    out.json(report.to_json())
    _say(f"{report.total_points} points, {len(report.interior_points)} interior ({report.elapsed:.2f}s)")
    return EXIT_OK if report.holds else EXIT_FAIL


def cmd_density(args, cfg, out) -> int:
    ring = _ring(args, cfg)
    with _usage():
        Q = parse_quad(args.quad, ring)
    gens = args.unit_gen or cfg.unit_generators
    try:
        cert = harvest_and_certify(Q, args.N, args.k, ring, args.fibers, args.H, args.degree, gens, args.jobs or cfg.jobs)
    except InsufficientPoints as exc:
        out.json({"points": 0, "certified": False, "error": str(exc)})
        _say(str(exc))
        return EXIT_FAIL
    except NoGenerator as exc:
        _say(str(exc))
        return EXIT_USAGE
    out.json(cert.to_json())
    _say(f"rank {cert.rank}/{cert.monomial_count} from {len(cert.points)} points: {'certified' if cert.certified else 'not certified'}")
    return EXIT_OK if cert.certified else EXIT_FAIL


def cmd_pell_check(args, cfg, out) -> int:
    with _usage():
        r = pell_bijection_report(args.alpha, args.k, args.H)
    out.json(r.to_json())
    _say(f"{len(r.fp_points)} FP points, {len(r.units)} units: {'bijection' if r.ok else 'MISMATCH'}")
    return EXIT_OK if r.ok else EXIT_FAIL


def cmd_verify(args, cfg, out) -> int:
    with _usage():
        only = {int(x) for x in args.only.split(",")} if args.only else None
    results = acceptance.run_all(only)
    for r in results:
        _say(r.line())
    out.json({"results": [r.to_json() for r in results], "passed": sum(r.ok for r in results), "total": len(results)})
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file (ring, unit_generators, node_limit, time_limit, output, jobs)")
    common.add_argument("--ring", help='ring literal: "Z", "Z[1/p]", "O(d)", "Z[sqrt(d)]" or "Z[i]"')
    common.add_argument("--jobs", type=int, help="worker processes (output order does not depend on it)")
    common.add_argument("--output", help="write JSON here instead of stdout")

    parser = argparse.ArgumentParser(prog="pcfvar", description="Periodic continued fractions, exact arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=fn)
        return p

    p = add("eval", cmd_eval, "exact and numeric value of a PCF")
    p.add_argument("--pcf", required=True, help='"[b1,..,bN; a1,..,ak]"')
    p.add_argument("--embedding", type=int, default=0, choices=(0, 1), help="real embedding (1: sqrt(d) < 0)")
    p.add_argument("--max-periods", type=int, default=10_000)

    p = add("quad", cmd_quad, "E matrix and quadratic of a PCF")
    p.add_argument("--pcf", required=True)

    p = add("expand", cmd_expand, "nearest-integer expansion over Z")
    p.add_argument("--value", required=True, help='e.g. "sqrt(2)", "(1+sqrt(5))/2", "7/3"')
    p.add_argument("--max-steps", type=int, default=10_000)

    p = add("expand-gauss", cmd_expand_gauss, "nearest-lattice-point expansion over an imaginary quadratic order")
    p.add_argument("--value", required=True)
    p.add_argument("--max-steps", type=int, default=500)

    p = add("mset", cmd_mset, "exceptional set M of an imaginary quadratic order")
    p.add_argument("--bound", type=int, default=6, help="search radius |c| <= bound")

    p = add("pell", cmd_pell, "fundamental unit of Z[sqrt(alpha)]")
    p.add_argument("--alpha", type=int, required=True)

    p = add("fp-points", cmd_fp_points, "lowest Fermat-Pell points from unit powers")
    p.add_argument("--quad", required=True, help='"A,B,C"')
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--unit-gen", action="append", help="unit generator literal (repeatable)")

    p = add("factor", cmd_factor, "solve Vbar_{N,k}(A) up to height H (JSON lines)")
    p.add_argument("--matrix", required=True, help='"a,b,c,d" row-major, det 1')
    p.add_argument("--N", type=int, required=True, choices=(0, 1))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--H", type=int, required=True)

    p = add("fiber", cmd_fiber, "PCF points over one Fermat-Pell point (JSON lines)")
    p.add_argument("--fp", required=True, help='"a,b,c,d"')
    p.add_argument("--quad", required=True)
    p.add_argument("--N", type=int, required=True, choices=(0, 1))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--H", type=int, required=True)

    p = add("scan-degenerate", cmd_scan, "exhaustive integral points with interior count")
    p.add_argument("--quad", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--mset-bound", type=float, default=6.0, help="search radius for M over imaginary orders")

    p = add("density-cert", cmd_density, "harvest fiber points and certify by exact rank")
    p.add_argument("--quad", required=True)
    p.add_argument("--N", type=int, required=True, choices=(0, 1))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--fibers", type=int, default=10)
    p.add_argument("--H", type=int, default=6)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--unit-gen", action="append")

    p = add("pell-check", cmd_pell_check, "FP points versus units: bijection check")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--H", type=int, required=True)

    p = add("verify-suite", cmd_verify, "run the acceptance battery")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = Config.load(args.config)
    except (OSError, ConfigError) as exc:
        _say(f"config: {exc}")
        return EXIT_USAGE
    out = Output(args.output or cfg.output)
    try:
        return args.func(args, cfg, out)
    except UsageError as exc:
        _say(f"usage error: {exc}")
        return EXIT_USAGE
    except PreconditionError as exc:
        _say(f"precondition: {exc}")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        _say(f"budget exceeded: {exc}")
        return EXIT_BUDGET
    finally:
        out.close()


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
