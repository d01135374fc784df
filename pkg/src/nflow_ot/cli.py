"""Command-line front end.

Exit codes: 0 success, 1 a verified mathematical violation (non-monotone
configuration, closed flow found under ``--assert-none``, failed
counterexample check), 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import dot, io
from .cost import FSpec
from .counterexample import FAIL, verify_counterexample
from .decompose import NotClosedError, decompose_closed_2flow, smirnov_decompose
from .lp import solve_transport
from .measures import marginals
from .monotonicity import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    check_monotone_lp,
    check_monotone_permutations,
)
from .nflow import (
    NFlow,
    associated_ngraph,
    boundary,
    find_finite_closed_flow,
    incidence_rank,
    is_closed,
    mass,
)
from .scalars import format_extended, format_rational, parse_rational

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_fspec(text: str) -> FSpec:
    """``default``, a comma list ``v1,...,vL,tail`` or a JSON file path."""
    if text == "default":
        return FSpec.default()
    if os.path.exists(text):
        return io.fspec_from_dict(io.load_json(text))
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError(f"empty f specification {text!r}")
    vals = [parse_rational(p) for p in parts]
    return FSpec(tuple(vals[:-1]), vals[-1])


def _graph_from_args(args):
    if getattr(args, "graph", None):
        return io.graph_from_dict(io.load_json(args.graph))
    if getattr(args, "cost", None) and getattr(args, "bound", None) is not None:
        return associated_ngraph(io.load_cost(args.cost), args.bound)
    raise UsageError("give --graph, or --cost together with --bound")


def cmd_verify(args):
    f = parse_fspec(args.f)
    rep = verify_counterexample(f, args.M, args.ell, budget=args.budget)
    if args.format == "text":
        out = io.report_text(rep)
    else:
        out = io.dumps(io.report_to_dict(rep))
    return out, EXIT_VIOLATION if rep.overall == FAIL else EXIT_OK


def cmd_solve_transport(args):
    c = io.load_cost(args.cost)
    d = io.load_json(args.marginals)
    recs = d["marginals"] if isinstance(d, dict) else d
    mus = [io.measure_from_dict(m) for m in recs]
    plan, value, pots = solve_transport(c, mus, return_potentials=True)
    res = {"value": format_extended(value), "plan": None if plan is None else io.plan_to_dict(plan)}
    if args.potentials and pots is not None:
        res["potentials"] = [
            {"atoms": [{"p": p, "u": format_rational(u)} for p, u in sorted(pk.items())]}
            for pk in pots
        ]
    if args.format == "text":
        lines = [f"value: {res['value']}"]
        if plan is not None:
            lines += [f"  {t}: {format_rational(w)}" for t, w in plan.items()]
        return "\n".join(lines) + "\n", EXIT_OK
    return io.dumps(res), EXIT_OK


def cmd_check_monotone(args):
    c = io.load_cost(args.cost)
    plan = io.plan_from_dict(io.load_json(args.plan))
    res = {}
    verdicts = []
    if args.method in ("perm", "both"):
        v = check_monotone_permutations(plan.support(), c, args.ell, budget=args.budget)
        res["permutations"] = io.verdict_to_dict(v)
        verdicts.append(v)
    if args.method in ("lp", "both"):
        v = check_monotone_lp(plan, c)
        res["lp"] = io.verdict_to_dict(v)
        verdicts.append(v)
    code = EXIT_OK if all(v.monotone for v in verdicts) else EXIT_VIOLATION
    if args.format == "text":
        lines = []
        for name, v in res.items():
            lines.append(f"{name}: {'monotone' if v['monotone'] else 'NOT monotone'}")
            w = v.get("witness")
            if w and "permutations" in w:
                lines.append(f"  tuples: {w['tuples']}")
                lines.append(f"  permutations: {w['permutations']}")
                lines.append(f"  lhs {w['lhs']} > rhs {w['rhs']}")
            elif w:
                lines.append(f"  competitor cost {w['competitor_cost']} < {w['original_cost']}")
        return "\n".join(lines) + "\n", code
    return io.dumps(res), code


def cmd_boundary(args):
    A = io.flow_from_dict(io.load_json(args.flow))
    b = boundary(A)
    res = {
        "boundary": io.boundary_to_dict(b),
        "closed": b.is_zero(),
        "mass": format_rational(mass(A)),
    }
    if args.format == "text":
        lines = [f"closed: {res['closed']}", f"mass: {res['mass']}"]
        for k, mu in enumerate(b.components, start=1):
            body = " ".join(f"{p}:{format_rational(w)}" for p, w in mu.items()) or "0"
            lines.append(f"  coordinate {k}: {body}")
        return "\n".join(lines) + "\n", EXIT_OK
    return io.dumps(res), EXIT_OK


def cmd_find_cycle(args):
    G = _graph_from_args(args)
    w = find_finite_closed_flow(G)
    res = {
        "edges": len(G.edges),
        "rank": incidence_rank(G.edges, G.n),
        "closed_flow": None if w is None else io.flow_to_dict(w),
    }
    code = EXIT_VIOLATION if (args.assert_none and w is not None) else EXIT_OK
    if args.format == "text":
        lines = [f"edges: {res['edges']}  rank: {res['rank']}"]
        if w is None:
            lines.append("no finite closed flow")
        else:
            lines.append("closed flow:")
            lines += [f"  {t}: {format_rational(x)}" for t, x in w.items()]
        return "\n".join(lines) + "\n", code
    return io.dumps(res), code


def cmd_decompose(args):
    A = io.flow_from_dict(io.load_json(args.flow))
    if args.loops:
        loops = decompose_closed_2flow(A)
        res = {
            "loops": [
                {"vertices": list(L.vertices), "w": format_rational(L.coefficient)} for L in loops
            ]
        }
        if args.format == "text":
            lines = [f"{len(loops)} loop(s)"]
            lines += [f"  {format_rational(L.coefficient)} x {list(L.vertices)}" for L in loops]
            return "\n".join(lines) + "\n", EXIT_OK
        return io.dumps(res), EXIT_OK
    parts = smirnov_decompose(A)
    res = {
        "acyclic": io.flow_to_dict(parts.acyclic),
        "solenoidal": io.flow_to_dict(parts.solenoidal),
        "cyclic": io.flow_to_dict(parts.cyclic),
    }
    if args.format == "text":
        lines = []
        for name in ("acyclic", "solenoidal", "cyclic"):
            part: NFlow = getattr(parts, name)
            lines.append(f"{name}: mass {format_rational(mass(part))}")
            lines += [f"  {t}: {format_rational(x)}" for t, x in part.items()]
        return "\n".join(lines) + "\n", EXIT_OK
    return io.dumps(res), EXIT_OK


def cmd_export_dot(args):
    if args.flow:
        A = io.flow_from_dict(io.load_json(args.flow))
        return dot.flow_to_dot(A), EXIT_OK
    return dot.graph_to_dot(_graph_from_args(args)), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nflow-ot",
        description="Exact checks for multi-marginal cyclical monotonicity and N-flows.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-counterexample", parents=[common],
                       help="run every check on the 3-marginal counterexample")
    p.add_argument("--f", default="default",
                   help="'default', a list 'f(1),...,f(L),tail', or a JSON file")
    p.add_argument("--M", type=int, default=3, help="largest truncation level")
    p.add_argument("--ell", type=int, default=3, help="largest cycle length for the permutation test")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve-transport", parents=[common], help="exact multi-marginal OT")
    p.add_argument("--cost", required=True)
    p.add_argument("--marginals", required=True,
                   help='JSON {"marginals": [measure, ...]}')
    p.add_argument("--potentials", action="store_true", help="also print dual potentials")
    p.set_defaults(func=cmd_solve_transport)

    p = sub.add_parser("check-monotone", parents=[common],
                       help="c-cyclical monotonicity of a plan's support")
    p.add_argument("--plan", required=True)
    p.add_argument("--cost", required=True)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--method", choices=("perm", "lp", "both"), default="perm")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_check_monotone)

    p = sub.add_parser("boundary", parents=[common], help="N-boundary and mass of a flow")
    p.add_argument("--flow", required=True)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("find-cycle", parents=[common], help="search a finite closed N-flow")
    p.add_argument("--graph")
    p.add_argument("--cost")
    p.add_argument("--bound", type=int)
    p.add_argument("--assert-none", action="store_true",
                   help="exit 1 if a closed flow exists")
    p.set_defaults(func=cmd_find_cycle)

    p = sub.add_parser("decompose", parents=[common], help="Smirnov split or 2-flow loops")
    p.add_argument("--flow", required=True)
    p.add_argument("--loops", action="store_true", help="loop decomposition of a closed 2-flow")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("export-dot", parents=[common], help="Graphviz star expansion")
    p.add_argument("--graph")
    p.add_argument("--flow")
    p.add_argument("--cost")
    p.add_argument("--bound", type=int)
    p.set_defaults(func=cmd_export_dot)
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = args.func(args)
    except (UsageError, io.SchemaError, NotClosedError, BudgetExceededError,
            ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"nflow-ot {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
