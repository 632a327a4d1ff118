"""Command-line front end: one verb per operator, plus the verifier surface.

Exit codes: 0 for success (including query verbs that answer false), 1 for a
failed verification or a numeric run that found violations, 2 for usage,
parse, and internal errors.  Structured output is a single JSON document per
run; identical invocations with fixed seeds emit byte-identical documents
apart from wall_time.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .calculus import (ConventionProfile, HeisenbergContext, L, L_inv, d,
                       in_I, in_J, reduce_mod_I, script_L)
from .coords import random_identity_check
from .dsl import ParseError, latex_form, parse_form, render_form, structured_form
from .forms import decompose_theta, wedge
from .identities import IdentityId, run_identity, suite_n_values
from .slicing import SlicingProfile, gamma_h, smooth_ramp, smooth_ramp_derivative

_CONVENTIONS = {"-": -1, "minus": -1, "+": 1, "plus": 1}


def _add_common(p, with_n=True):
    if with_n:
        p.add_argument("--n", type=int, default=1, help="ambient index n (dimension 2n+1)")
    p.add_argument("--convention", choices=sorted(_CONVENTIONS), default="-",
                   help="sign profile for d(theta)")
    p.add_argument("--format", choices=("text", "structured", "latex"), default="text")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hforms",
        description="Exterior calculus on the Heisenberg frame: operators, "
                    "identity verification, numeric cross-checks, slicing ramps.")
    sub = top.add_subparsers(dest="verb", required=True)

    for name, helptext in (
            ("d", "exterior derivative of a form"),
            ("L", "wedge with d(theta) on a horizontal form"),
            ("Linv", "invert the d(theta) wedge on a middle-degree form"),
            ("scriptL", "vertical correction operator"),
            ("project", "split a form into theta-free part and theta-coefficient"),
            ("inJ", "membership in the annihilator space at the form's degree"),
            ("inI", "membership in the generated ideal at the form's degree"),
            ("reduceI", "canonical representative modulo the ideal")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("expr", help="form expression, e.g. 'X1(g)*dx1 + T(g)*theta'")
        _add_common(p)

    p = sub.add_parser("wedge", help="wedge product of two forms")
    p.add_argument("expr1")
    p.add_argument("expr2")
    _add_common(p)

    p = sub.add_parser("verify", help="run one identity checker, or all of them")
    p.add_argument("identity",
                   help="'all' or one of: " + ", ".join(i.value for i in IdentityId))
    p.add_argument("--n", type=int, default=None,
                   help="run at this n only (default: each identity's full range)")
    p.add_argument("--convention", choices=sorted(_CONVENTIONS), default="-")
    p.add_argument("--format", choices=("text", "structured", "latex"), default="text")

    p = sub.add_parser("eval", help="numeric spot-check of an identity at random points")
    p.add_argument("identity", help=", ".join(i.value for i in IdentityId))
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--convention", choices=sorted(_CONVENTIONS), default="-")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt-rhs", action="store_true",
                   help="mutation hook: corrupt the right side and expect violations")
    p.add_argument("--format", choices=("text", "structured", "latex"), default="text")

    p = sub.add_parser("ramp", help="evaluate the slicing ramp and its smooth approximant")
    p.add_argument("s", type=Fraction, help="evaluation point (rational, e.g. 1/3 or 0.25)")
    p.add_argument("--t", type=Fraction, default=Fraction(0), help="cut location")
    p.add_argument("--h", type=Fraction, default=Fraction(1), help="window width")
    p.add_argument("--eps", type=Fraction, default=None, help="mollification radius")
    p.add_argument("--format", choices=("text", "structured", "latex"), default="text")

    return top


def _emit_structured(doc) -> None:
    print(json.dumps(doc, indent=2))


def _operator_result(args, profile: ConventionProfile):
    ctx = HeisenbergContext(args.n, profile)
    parse = lambda text: parse_form(text, args.n, bracket=profile.bracket)
    verb = args.verb
    if verb == "wedge":
        return wedge(parse(args.expr1), parse(args.expr2))
    form = parse(args.expr)
    if verb == "d":
        return d(form, ctx)
    if verb == "L":
        return L(form, ctx)
    if verb == "Linv":
        return L_inv(form, ctx)
    if verb == "scriptL":
        return script_L(form, ctx)
    if verb == "project":
        prime, beta = decompose_theta(form, args.n)
        return {"prime": prime, "beta": beta}
    if verb == "inJ":
        return in_J(form, form.degree, ctx)
    if verb == "inI":
        return in_I(form, form.degree, ctx)
    if verb == "reduceI":
        return reduce_mod_I(form, form.degree, ctx)
    raise ValueError(f"unhandled verb {verb!r}")


def _render_result(value, n: int, fmt: str):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, dict):
        return {k: _render_result(v, n, fmt) for k, v in value.items()}
    if fmt == "latex":
        return latex_form(value, n)
    if fmt == "structured":
        return structured_form(value, n)
    return render_form(value, n)


def _run_operator(args) -> int:
    profile = ConventionProfile(_CONVENTIONS[args.convention])
    start = time.perf_counter()
    value = _operator_result(args, profile)
    wall = time.perf_counter() - start
    rendered = _render_result(value, args.n, args.format)
    if args.format == "structured":
        _emit_structured({
            "verb": args.verb, "n": args.n, "convention": profile.label,
            "status": "ok", "result": rendered, "line_audit": [],
            "seed": None, "wall_time": wall,
        })
    elif isinstance(rendered, dict):
        for key, text in rendered.items():
            print(f"{key}: {text}")
    else:
        print(rendered)
    return 0


def _run_verify(args) -> int:
    profile = ConventionProfile(_CONVENTIONS[args.convention])
    if args.identity == "all":
        targets = [(ident, n)
                   for ident in IdentityId
                   for n in suite_n_values(ident, None if args.n is None else (args.n,))]
    else:
        ident = IdentityId(args.identity)
        n_values = suite_n_values(ident, None) if args.n is None else (args.n,)
        targets = [(ident, n) for n in n_values]
    reports = [run_identity(ident, n, profile) for ident, n in targets]

    if args.format == "structured":
        docs = [r.structured() for r in reports]
        _emit_structured(docs[0] if len(docs) == 1 else docs)
    elif args.format == "latex":
        for r in reports:
            print(f"% {r.identity.value}  n={r.n}  convention={r.convention}  {r.status}")
            print(f"lhs = {r.latex['lhs']}")
            print(f"rhs = {r.latex['rhs']}")
            print(f"difference = {r.latex['difference']}")
    else:
        for r in reports:
            print(f"{r.identity.value}  n={r.n}  convention={r.convention}  "
                  f"{r.status}  ({r.wall_time:.3f}s)")
            for note in r.notes:
                print(f"    note: {note}")
            for line in r.line_audit:
                print(f"    [{line.flag}] {line.label}: {line.detail}")
                if line.flag != "match":
                    print(f"        written: {line.written}")
                    print(f"        graded:  {line.graded}")
            if not r.verified:
                print(f"    difference: {render_form(r.difference, r.n)}")
    return 0 if all(r.verified for r in reports) else 1


def _run_eval(args) -> int:
    if _CONVENTIONS[args.convention] != -1:
        raise ValueError("the coordinate lab realizes the default '-' profile only")
    ident = IdentityId(args.identity)
    start = time.perf_counter()
    report = random_identity_check(ident, n=args.n, trials=args.trials,
                                   seed=args.seed, corrupt_rhs=args.corrupt_rhs)
    wall = time.perf_counter() - start
    ok = report["violations"] == 0
    if args.format == "structured":
        _emit_structured({
            "verb": "eval", "n": args.n, "convention": "-",
            "status": "ok" if ok else "violations-found", "result": report,
            "line_audit": [], "seed": args.seed, "wall_time": wall,
        })
    else:
        print(f"{ident.value}  n={args.n}  trials={report['trials']}  "
              f"seed={report['seed']}  corrupted={report['corrupted']}  "
              f"violations={report['violations']}")
    return 0 if ok else 1


def _run_ramp(args) -> int:
    prof = SlicingProfile(args.t, args.h, args.eps)
    start = time.perf_counter()
    values = {
        "gamma": gamma_h(args.s, prof),
        "smooth": smooth_ramp(args.s, prof),
        "derivative": smooth_ramp_derivative(args.s, prof),
    }
    wall = time.perf_counter() - start
    if args.format == "structured":
        _emit_structured({
            "verb": "ramp", "n": None, "convention": "-", "status": "ok",
            "result": {k: str(v) for k, v in values.items()},
            "line_audit": [], "seed": None, "wall_time": wall,
        })
    else:
        for key, v in values.items():
            print(f"{key} = {v}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "verify":
            return _run_verify(args)
        if args.verb == "eval":
            return _run_eval(args)
        if args.verb == "ramp":
            return _run_ramp(args)
        return _run_operator(args)
    except ParseError as exc:
        print(f"parse error at position {exc.position}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
