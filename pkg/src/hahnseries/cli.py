"""Command line front end.

Subcommands mirror the library operations: validate a derivation spec,
differentiate and evaluate, conjugate equations, compute indicial data,
solve, and manipulate grid sets.  All numeric input and output is exact
rational text; exit status 0 on success, 1 on domain errors (invalid spec,
non-accessible truncation, refused transformation), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import solver
from .conjugate import (additive_conjugate, change_derivation,
                        multiplicative_conjugate)
from .derivation import (DerivationSpec, derive, script_t, validate_spec)
from .diffpoly import (DifferentialPolynomial, evaluate, indicial_data,
                       weierstrass_normalize)
from .errors import HahnSeriesError
from .provenance import TransformRecord
from .series import GeneralizedSeries
from .supports import (gs_add_generator, gs_enumerate_below, gs_member,
                       gs_semigroup, gs_sum, gs_translate_neg)
from .textio import (exponent_to_json, format_gridset, format_series,
                     gridset_to_json, parse_exponent, parse_gridset,
                     parse_series)


def load_spec(path: str) -> DerivationSpec:
    with open(path) as handle:
        payload = json.load(handle)
    rank = int(payload["rank"])
    series = tuple(parse_series(text, rank)
                   for text in payload["log_derivatives"])
    return DerivationSpec(rank, series)


def load_equation(path: str, rank: int) -> DifferentialPolynomial:
    with open(path) as handle:
        payload = json.load(handle)
    order = int(payload["order"])
    derivation = int(payload.get("derivation", 0))
    entries = {}
    for item in payload["coefficients"]:
        index = tuple(int(i) for i in item["index"])
        entries[index] = parse_series(item["series"], rank)
    return DifferentialPolynomial.from_coefficients(
        rank, order, derivation, entries)


def equation_to_json(poly: DifferentialPolynomial) -> dict:
    return {
        "order": poly.order,
        "derivation": poly.derivation_index,
        "coefficients": [
            {"index": list(index),
             "series": format_series(poly.coefficients[index])}
            for index in poly.indices()
        ],
    }


def _print_constants(spec: DerivationSpec) -> None:
    consts = spec.constants
    print(f"rank {spec.rank}, k0 = {consts.k0}")
    header = f"{'k':>3} {'d_k':>16} {'tau^(k)':>14} {'theta^(k)':>14} " \
             f"{'tilde(k)':>9}"
    print(header)
    for k in range(1, spec.rank + 1):
        c = consts.for_class(k)
        d_text = format_series(
            GeneralizedSeries.monomial(spec.rank, c.theta, c.d_coefficient))
        tilde = str(c.tilde_class) if c.tilde_class is not None else "-"
        print(f"{k:>3} {d_text:>16} {str(c.tau):>14} {str(c.theta):>14} "
              f"{tilde:>9}")


def cmd_validate(args) -> int:
    try:
        spec = load_spec(args.spec)
        consts = validate_spec(spec)
    except HahnSeriesError as err:
        if hasattr(err, "violations"):
            for violation in err.violations:
                print(f"FAIL {violation}")
        else:
            print(f"FAIL {err}")
        return 1
    if args.json:
        payload = {
            "rank": spec.rank,
            "k0": consts.k0,
            "classes": [
                {
                    "k": k,
                    "d_coefficient": str(consts.for_class(k).d_coefficient),
                    "theta": exponent_to_json(consts.theta(k)),
                    "tau": exponent_to_json(consts.for_class(k).tau),
                    "tilde": consts.for_class(k).tilde_class,
                }
                for k in range(1, spec.rank + 1)
            ],
        }
        print(json.dumps(payload, indent=2))
    else:
        _print_constants(spec)
        print("PASS all axioms (HD2, HD3, tau-matrix, d-ratio law)")
    return 0


def cmd_derive(args) -> int:
    spec = load_spec(args.spec)
    series = parse_series(args.series, spec.rank)
    out = derive(series, spec, args.klass, args.iterations)
    print(format_series(out))
    return 0


def cmd_eval(args) -> int:
    spec = load_spec(args.spec)
    poly = load_equation(args.equation, spec.rank)
    point = parse_series(args.at, spec.rank)
    print(format_series(evaluate(poly, point, spec)))
    return 0


def cmd_conjugate_add(args) -> int:
    spec = load_spec(args.spec)
    poly = load_equation(args.equation, spec.rank)
    a = parse_series(args.by, spec.rank)
    out = additive_conjugate(poly, a, spec)
    _emit_equation(args, out)
    return 0


def cmd_conjugate_mul(args) -> int:
    spec = load_spec(args.spec)
    poly = load_equation(args.equation, spec.rank)
    m = parse_series(args.by, spec.rank)
    out = multiplicative_conjugate(poly, m, spec)
    _emit_equation(args, out)
    return 0


def cmd_change_deriv(args) -> int:
    spec = load_spec(args.spec)
    poly = load_equation(args.equation, spec.rank)
    out = change_derivation(poly, args.to, spec)
    _emit_equation(args, out)
    return 0


def _emit_equation(args, poly: DifferentialPolynomial) -> None:
    payload = equation_to_json(poly)
    bounds = [rec.support_bound for rec in poly.provenance
              if rec.support_bound is not None]
    if args.json:
        if bounds:
            payload["support_bound"] = gridset_to_json(bounds[-1])
        print(json.dumps(payload, indent=2))
    else:
        for item in payload["coefficients"]:
            print(f"[{','.join(map(str, item['index']))}] {item['series']}")
        if bounds:
            print(f"support bound: {format_gridset(bounds[-1])}")
    if args.out:
        with open(args.out, "w") as handle:
            json.dump(payload, handle, indent=2)


def cmd_indicial(args) -> int:
    spec = load_spec(args.spec)
    poly = load_equation(args.equation, spec.rank)
    normalized, w, shift = weierstrass_normalize(poly)
    data = indicial_data(normalized, spec)
    if args.json:
        print(json.dumps({
            "shift": exponent_to_json(shift),
            "weierstrass_order": w,
            "witness_set": [list(i) for i in data.witness_set],
            "pi": [str(c) for c in data.pi_coefficients],
            "rational_roots": [str(r) for r in data.rational_roots],
            "irrational_root_flag": data.irrational_root_flag,
        }, indent=2))
        return 0
    print(f"normalization shift {shift}, Weierstrass order {w}")
    print("witness set A:",
          ", ".join("(" + ",".join(map(str, i)) + ")"
                    for i in data.witness_set))
    pi_text = " + ".join(f"{c}*X^{d}"
                         for d, c in enumerate(data.pi_coefficients) if c)
    print(f"pi(X) = {pi_text or '0'}")
    print("positive rational roots:",
          ", ".join(str(r) for r in data.rational_roots) or "none")
    if data.irrational_root_flag:
        print("warning: a positive irrational root exists")
    return 0


def cmd_solve(args) -> int:
    spec = load_spec(args.spec)
    poly = load_equation(args.equation, spec.rank)
    budget = solver.SolveBudget(
        max_terms=args.budget_terms, max_branches=args.budget_branches,
        max_reduction_depth=args.budget_depth,
        enumeration_cap=args.enum_cap)
    policy = solver.ResonancePolicy.parse(args.resonance_policy)
    outcomes = solver.solve(poly, spec, budget, policy)
    if args.json:
        print(json.dumps([_outcome_to_json(o) for o in outcomes], indent=2))
        return 0
    for i, outcome in enumerate(outcomes):
        print(f"[{i}] {outcome.variant}: {format_series(outcome.prefix)}")
        trace = ", ".join(
            f"({n}, {v if v is not None else 'infinity'})"
            for n, v in outcome.valuation_trace)
        print(f"    trace: {trace}")
        for note in outcome.resonances:
            print(f"    resonance at {note.exponent}: {note.note}")
        if outcome.stabilized_value is not None:
            print(f"    stabilized value: {outcome.stabilized_value}")
        print(f"    support bound R: {format_gridset(outcome.support_bound)}")
        for warning in outcome.warnings:
            print(f"    warning: {warning}")
    return 0


def _outcome_to_json(outcome: solver.SolveOutcome) -> dict:
    return {
        "variant": outcome.variant,
        "prefix": format_series(outcome.prefix),
        "valuation_trace": [
            [n, exponent_to_json(v) if v is not None else None]
            for n, v in outcome.valuation_trace],
        "resonances": [
            {"exponent": exponent_to_json(n.exponent), "note": n.note}
            for n in outcome.resonances],
        "support_bound": gridset_to_json(outcome.support_bound),
        "provenance": [rec.to_json() for rec in outcome.provenance],
        "warnings": list(outcome.warnings),
        "stabilized_value": (
            exponent_to_json(outcome.stabilized_value)
            if outcome.stabilized_value is not None else None),
    }


def cmd_support_bound(args) -> int:
    spec = load_spec(args.spec)
    with open(args.provenance) as handle:
        payload = json.load(handle)
    records = tuple(TransformRecord.from_json(item, spec.rank)
                    for item in payload)
    bound = solver.support_bound_R(records, spec, spec.rank)
    if args.json:
        print(json.dumps(gridset_to_json(bound), indent=2))
    else:
        print(format_gridset(bound))
    return 0


def cmd_gridset(args) -> int:
    rank = args.rank
    x = parse_gridset(args.set, rank)
    if args.op == "sum":
        out = gs_sum(x, parse_gridset(args.other, rank))
    elif args.op == "semigroup":
        out = gs_semigroup(x)
    elif args.op == "add-generator":
        out = gs_add_generator(x, parse_exponent(args.exponent, rank))
    elif args.op == "translate":
        out = gs_translate_neg(x, parse_exponent(args.exponent, rank))
    elif args.op == "member":
        verdict = gs_member(x, parse_exponent(args.exponent, rank),
                            args.enum_cap)
        print(verdict)
        return 0
    elif args.op == "enumerate":
        points = gs_enumerate_below(x, parse_exponent(args.exponent, rank),
                                    args.enum_cap)
        print(", ".join(str(p) for p in points))
        return 0
    else:
        raise ValueError(f"unknown gridset op {args.op}")
    if args.json:
        print(json.dumps(gridset_to_json(out), indent=2))
    else:
        print(format_gridset(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hahnseries",
        description="Exact generalized power series with Hardy-type "
                    "derivations")
    parser.add_argument("--json", action="store_true",
                        help="structured JSON output")
    parser.add_argument("--enum-cap", type=int, default=10000,
                        help="cap for bounded enumerations")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="check a derivation spec")
    p.add_argument("--spec", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("derive", help="apply D_k^i to a series")
    p.add_argument("--spec", required=True)
    p.add_argument("--klass", type=int, default=0, metavar="K",
                   help="0 for the base derivation, else the class")
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("series")
    p.set_defaults(fn=cmd_derive)

    p = sub.add_parser("eval", help="evaluate an equation at a series")
    p.add_argument("--spec", required=True)
    p.add_argument("--equation", required=True)
    p.add_argument("--at", required=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("conjugate-add", help="additive conjugation")
    p.add_argument("--spec", required=True)
    p.add_argument("--equation", required=True)
    p.add_argument("--by", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_conjugate_add)

    p = sub.add_parser("conjugate-mul", help="multiplicative conjugation")
    p.add_argument("--spec", required=True)
    p.add_argument("--equation", required=True)
    p.add_argument("--by", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_conjugate_mul)

    p = sub.add_parser("change-deriv", help="change of derivation")
    p.add_argument("--spec", required=True)
    p.add_argument("--equation", required=True)
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_change_deriv)

    p = sub.add_parser("indicial", help="indicial polynomial data")
    p.add_argument("--spec", required=True)
    p.add_argument("--equation", required=True)
    p.set_defaults(fn=cmd_indicial)

    p = sub.add_parser("solve", help="term-by-term solve")
    p.add_argument("--spec", required=True)
    p.add_argument("--equation", required=True)
    p.add_argument("--budget-terms", type=int, default=12)
    p.add_argument("--budget-branches", type=int, default=64)
    p.add_argument("--budget-depth", type=int, default=6)
    p.add_argument("--resonance-policy", default="zero")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("support-bound",
                       help="replay a provenance file into R")
    p.add_argument("--spec", required=True)
    p.add_argument("--provenance", required=True)
    p.set_defaults(fn=cmd_support_bound)

    p = sub.add_parser("gridset", help="grid-set calculus")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--op", required=True,
                   choices=["sum", "semigroup", "add-generator", "translate",
                            "member", "enumerate"])
    p.add_argument("--set", required=True)
    p.add_argument("--other")
    p.add_argument("--exponent")
    p.set_defaults(fn=cmd_gridset)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except HahnSeriesError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
