"""JSON records for measures, plans, flows, costs, graphs and reports.

Rationals travel as strings ``"p/q"`` (or ``"p"``); ``"inf"`` is the only
non-rational token.  Output is canonical: sorted atoms, sorted keys.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cost import CostFn, FSpec, cost_from_dict
from .counterexample import VerificationReport
from .measures import AtomicMeasure, Plan
from .monotonicity import CompetitorWitness, MonotonicityVerdict, PermutationWitness
from .nflow import BoundaryVector, NFlow, NGraph
from .scalars import format_extended, format_rational, parse_extended, parse_rational


class SchemaError(ValueError):
    """Input does not match the expected record layout."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _weight(text) -> Fraction:
    if not isinstance(text, str):
        raise SchemaError(f"weights must be strings like '1/2', got {text!r}")
    return parse_rational(text)


def _points(t) -> tuple:
    if not isinstance(t, list) or not all(isinstance(p, int) and not isinstance(p, bool) for p in t):
        raise SchemaError(f"tuples must be integer arrays, got {t!r}")
    return tuple(t)


def measure_to_dict(mu: AtomicMeasure) -> dict:
    return {"atoms": [{"p": p, "w": format_rational(w)} for p, w in mu.items()]}


def measure_from_dict(d: dict) -> AtomicMeasure:
    try:
        return AtomicMeasure([(int(a["p"]), _weight(a["w"])) for a in d["atoms"]])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad measure record: {exc}") from None


def plan_to_dict(p) -> dict:
    return {"n": p.n, "atoms": [{"t": list(t), "w": format_rational(w)} for t, w in p.items()]}


def flow_to_dict(A: NFlow) -> dict:
    return {"n": A.n, "edges": [{"t": list(t), "w": format_rational(w)} for t, w in A.items()]}


def _tuple_records(d: dict):
    if "atoms" in d:
        recs = d["atoms"]
    elif "edges" in d:
        recs = d["edges"]
    else:
        raise SchemaError("expected an 'atoms' or 'edges' array")
    n = d.get("n")
    if n is None:
        raise SchemaError("missing arity 'n'")
    try:
        return int(n), [(_points(r["t"]), _weight(r["w"])) for r in recs]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad tuple record: {exc}") from None


def plan_from_dict(d: dict) -> Plan:
    n, recs = _tuple_records(d)
    return Plan(n, recs)


def flow_from_dict(d: dict) -> NFlow:
    n, recs = _tuple_records(d)
    return NFlow(n, recs)


def boundary_to_dict(b: BoundaryVector) -> dict:
    return {"components": [measure_to_dict(mu) for mu in b.components]}


def boundary_from_dict(d: dict) -> BoundaryVector:
    return BoundaryVector(tuple(measure_from_dict(m) for m in d["components"]))


def cost_to_dict(c: CostFn) -> dict:
    return c.to_dict()


def graph_to_dict(G: NGraph) -> dict:
    return {"n": G.n, "edges": [list(e) for e in G.edges]}


def graph_from_dict(d: dict) -> NGraph:
    try:
        n = int(d["n"])
        edges = [_points(e["t"] if isinstance(e, dict) else e) for e in d["edges"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad graph record: {exc}") from None
    return NGraph(n, tuple(edges))


def fspec_to_dict(f: FSpec) -> dict:
    return {"prefix": [format_rational(v) for v in f.prefix], "tail": format_rational(f.tail)}


def fspec_from_dict(d: dict) -> FSpec:
    return FSpec(tuple(parse_rational(v) for v in d["prefix"]), parse_rational(d["tail"]))


def verdict_to_dict(v: MonotonicityVerdict) -> dict:
    out = {"monotone": v.monotone}
    if v.ell_checked is not None:
        out["ell_checked"] = v.ell_checked
    w = v.witness
    if isinstance(w, PermutationWitness):
        out["witness"] = {
            "tuples": [list(t) for t in w.tuples],
            "permutations": [list(s) for s in w.permutations],
            "competitor": [list(t) for t in w.competitor_tuples()],
            "lhs": format_extended(w.lhs),
            "rhs": format_extended(w.rhs),
        }
    elif isinstance(w, CompetitorWitness):
        out["witness"] = {
            "competitor": plan_to_dict(w.competitor),
            "original_cost": format_extended(w.original_cost),
            "competitor_cost": format_extended(w.competitor_cost),
        }
    return out


def verdict_from_dict(d: dict) -> MonotonicityVerdict:
    w = d.get("witness")
    witness = None
    if w is not None:
        if "tuples" in w:
            witness = PermutationWitness(
                tuple(tuple(t) for t in w["tuples"]),
                tuple(tuple(s) for s in w["permutations"]),
                parse_extended(w["lhs"]),
                parse_extended(w["rhs"]),
            )
        else:
            witness = CompetitorWitness(
                plan_from_dict(w["competitor"]),
                parse_extended(w["original_cost"]),
                parse_extended(w["competitor_cost"]),
            )
    return MonotonicityVerdict(d["monotone"], witness, d.get("ell_checked"))


def report_to_dict(r: VerificationReport) -> dict:
    return {
        "f": fspec_to_dict(r.f),
        "M_max": r.M_max,
        "ell_max": r.ell_max,
        "f_condition": {
            "lhs": format_rational(r.f_condition["lhs"]),
            "holds": r.f_condition["holds"],
        },
        "marginal_checks": {str(M): ok for M, ok in r.marginal_checks.items()},
        "cost_gamma": format_rational(r.cost_gamma),
        "cost_gammabar": format_rational(r.cost_gammabar),
        "gap": format_rational(r.gap),
        "displayed_gap": format_rational(r.displayed_gap),
        "closed_flow_absent": {str(M): ok for M, ok in r.closed_flow_absent.items()},
        "monotonicity_verdicts": {
            str(M): verdict_to_dict(v) for M, v in r.monotonicity_verdicts.items()
        },
        "lp_checks": {
            str(M): {
                "monotone": c["monotone"],
                "optimum_is_gamma": c["optimum_is_gamma"],
                "unique": c["unique"],
                "value": format_extended(c["value"]),
            }
            for M, c in r.lp_checks.items()
        },
        "skipped": dict(r.skipped),
        "failures": list(r.failures),
        "overall": r.overall,
        "gammabar_truncation": "levels k <= M of the gammabar sum (support reaches 2M+1)",
    }


def report_from_dict(d: dict) -> VerificationReport:
    r = VerificationReport(fspec_from_dict(d["f"]), d["M_max"], d["ell_max"])
    r.f_condition = {"lhs": parse_rational(d["f_condition"]["lhs"]), "holds": d["f_condition"]["holds"]}
    r.marginal_checks = {int(M): ok for M, ok in d["marginal_checks"].items()}
    r.cost_gamma = parse_rational(d["cost_gamma"])
    r.cost_gammabar = parse_rational(d["cost_gammabar"])
    r.gap = parse_rational(d["gap"])
    r.displayed_gap = parse_rational(d["displayed_gap"])
    r.closed_flow_absent = {int(M): ok for M, ok in d["closed_flow_absent"].items()}
    r.monotonicity_verdicts = {
        int(M): verdict_from_dict(v) for M, v in d["monotonicity_verdicts"].items()
    }
    r.lp_checks = {
        int(M): {
            "monotone": c["monotone"],
            "optimum_is_gamma": c["optimum_is_gamma"],
            "unique": c["unique"],
            "value": parse_extended(c["value"]),
        }
        for M, c in d["lp_checks"].items()
    }
    r.skipped = dict(d["skipped"])
    r.failures = list(d["failures"])
    return r


def report_text(r: VerificationReport) -> str:
    fc = r.f_condition
    lines = [
        f"counterexample verification: f prefix={[format_rational(v) for v in r.f.prefix]} "
        f"tail={format_rational(r.f.tail)}, M_max={r.M_max}, ell_max={r.ell_max}",
        f"(i)   sum 4^-k (f(2k-1) - f(2k)) = {format_rational(fc['lhs'])}  > 1/6: {fc['holds']}",
        f"(ii)  marginals equal mu up to level M: "
        + ", ".join(f"M={M}:{ok}" for M, ok in r.marginal_checks.items()),
        f"(iii) <c,gamma> = {format_rational(r.cost_gamma)}, <c,gammabar> = "
        f"{format_rational(r.cost_gammabar)}, gap = {format_rational(r.gap)} "
        f"(displayed-variant expression: {format_rational(r.displayed_gap)})",
        f"(iv)  no finite closed 3-flow on vertices 1..2M+1: "
        + ", ".join(f"M={M}:{ok}" for M, ok in r.closed_flow_absent.items()),
        f"(v)   permutation test up to l={r.ell_max}: "
        + ", ".join(f"M={M}:{v.monotone}" for M, v in r.monotonicity_verdicts.items()),
    ]
    for name, reason in r.skipped.items():
        lines.append(f"      skipped {name}: {reason}")
    lines.append(
        "(vi)  LP optimum is gamma_M and unique: "
        + ", ".join(
            f"M={M}:{c['monotone'] and c['optimum_is_gamma'] and c['unique']} (value {format_extended(c['value'])})"
            for M, c in r.lp_checks.items()
        )
    )
    lines.append(f"overall: {r.overall}")
    if r.failures:
        lines.append("failed: " + ", ".join(r.failures))
    return "\n".join(lines) + "\n"


def load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def load_cost(path: str) -> CostFn:
    d = load_json(path)
    try:
        return cost_from_dict(d)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad cost record: {exc}") from None
