"""Command-line interface.

Subcommands:
  solve    decide a formula; exit 0 when satisfiable, 1 when unsatisfiable
  check    evaluate a formula against a model JSON file; exit 0 iff it holds
  oracle   brute-force search for a model within configurable bounds
  graph    print the certificate graph of a satisfiable formula (DOT/JSON)

Any error (syntax, size limits, bad files) exits with code 2 and a
structured message.  The formula is given inline, via --file, or as "-" for
stdin.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import SetSatError
from .formulas import (
    Atom, AtomF, Formula, Not, format_atom, normalize_formula, parse_formula,
)
from .oracle import OracleConfig, oracle_search
from .semantics import (
    assignment_from_json, assignment_to_json, eval_atom, eval_formula,
)
from .solver import (
    SolverLimits, solve_formula, verdict_to_json,
)
from .tgraph import format_place, to_dot


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setsat",
        description="decide satisfiability of set formulas with unordered "
        "Cartesian product",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, formats=("text", "json")):
        p.add_argument(
            "formula",
            nargs="?",
            help="formula text, or '-' to read it from stdin",
        )
        p.add_argument("-f", "--file", help="read the formula from this file")
        p.add_argument(
            "--format", choices=formats, default=formats[0], dest="fmt"
        )
        p.add_argument("--max-vars", type=int, default=10)
        p.add_argument("--dnf-cap", type=int, default=4096)
        p.add_argument(
            "--budget",
            type=int,
            default=200_000,
            help="element budget for model construction",
        )
        p.add_argument(
            "--certificate-cap",
            type=int,
            default=200_000,
            help="maximum number of candidate certificates to examine",
        )

    solve = sub.add_parser("solve", help="decide satisfiability")
    add_common(solve)
    solve.add_argument(
        "--dump-certificate",
        action="store_true",
        help="also print the certificate as JSON",
    )
    solve.add_argument(
        "--dump-graph",
        action="store_true",
        help="also print the certificate graph as DOT",
    )

    check = sub.add_parser("check", help="evaluate a formula against a model")
    add_common(check)
    check.add_argument(
        "--model", required=True, help="model JSON file ({\"vars\": ...})"
    )

    oracle = sub.add_parser("oracle", help="brute-force model search")
    add_common(oracle)
    oracle.add_argument("--oracle-rank", type=int, default=3)
    oracle.add_argument("--oracle-universe", type=int, default=8)
    oracle.add_argument("--oracle-vars", type=int, default=3)

    graph = sub.add_parser("graph", help="print the certificate graph")
    add_common(graph, formats=("dot", "json"))
    return parser


def _read_formula(args) -> str:
    sources = [s for s in (args.formula, args.file) if s]
    if len(sources) != 1:
        raise SetSatError("provide exactly one formula source")
    if args.file:
        with open(args.file, "r", encoding="utf-8") as handle:
            return handle.read()
    if args.formula == "-":
        return sys.stdin.read()
    return args.formula


def _limits(args) -> SolverLimits:
    return SolverLimits(
        max_vars=args.max_vars,
        dnf_cap=args.dnf_cap,
        element_budget=args.budget,
        certificate_cap=args.certificate_cap,
    )


def _emit_error(fmt: str, err: SetSatError):
    if fmt == "json":
        print(json.dumps({"error": type(err).__name__, "message": str(err)}))
    else:
        print(f"error[{type(err).__name__}]: {err}", file=sys.stderr)


def _cmd_solve(args) -> int:
    verdict = solve_formula(_read_formula(args), _limits(args))
    if args.fmt == "json":
        print(json.dumps(verdict_to_json(verdict), indent=2))
    else:
        print(f"status: {verdict.status}")
        if verdict.model is not None:
            for name in sorted(verdict.model):
                print(f"  {name} = {verdict.model[name].to_text()}")
        if verdict.cycle is not None:
            pretty = " -> ".join(
                format_place(v)
                if v in verdict.certificate.graph.places
                else "[" + " ".join(format_place(p) for p in sorted(v, key=str)) + "]"
                for v in verdict.cycle
            )
            print(f"  cycle: {pretty}")
        if args.dump_certificate and verdict.certificate is not None:
            cert_json = verdict_to_json(verdict).get("certificate")
            print(json.dumps(cert_json, indent=2))
        if args.dump_graph and verdict.certificate is not None:
            print(to_dot(verdict.certificate.graph))
    return 0 if verdict.is_sat() else 1


def _formula_atoms(formula: Formula) -> list[Atom]:
    out: list[Atom] = []

    def walk(g: Formula):
        if isinstance(g, AtomF):
            if g.atom not in out:
                out.append(g.atom)
        elif isinstance(g, Not):
            walk(g.inner)
        else:
            walk(g.left)
            walk(g.right)

    walk(formula)
    return out


def _cmd_check(args) -> int:
    formula = parse_formula(_read_formula(args))
    with open(args.model, "r", encoding="utf-8") as handle:
        model = assignment_from_json(json.load(handle))
    atoms = _formula_atoms(formula)
    results = {format_atom(a): eval_atom(model, a) for a in atoms}
    holds = eval_formula(model, formula)
    if args.fmt == "json":
        print(json.dumps({"atoms": results, "formula": holds}, indent=2))
    else:
        for text, value in results.items():
            print(f"  {text}: {value}")
        print(f"formula: {holds}")
    return 0 if holds else 1


def _cmd_oracle(args) -> int:
    cfg = OracleConfig(
        max_rank=args.oracle_rank,
        universe_cap=args.oracle_universe,
        var_cap=args.oracle_vars,
    )
    formula = parse_formula(_read_formula(args))
    for conj in normalize_formula(formula, dnf_cap=args.dnf_cap):
        model = oracle_search(conj, cfg)
        if model is not None:
            original = {v: model[v] for v in conj.original_vars}
            if args.fmt == "json":
                print(json.dumps(assignment_to_json(original)))
            else:
                for name in sorted(original):
                    print(f"  {name} = {original[name].to_text()}")
            return 0
    print("none within bounds" if args.fmt == "text" else json.dumps(None))
    return 1


def _cmd_graph(args) -> int:
    verdict = solve_formula(_read_formula(args), _limits(args))
    if not verdict.is_sat():
        print("unsat: no certificate graph", file=sys.stderr)
        return 1
    if args.fmt == "json":
        print(json.dumps(verdict_to_json(verdict)["certificate"], indent=2))
    else:
        print(to_dot(verdict.certificate.graph))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "check": _cmd_check,
        "oracle": _cmd_oracle,
        "graph": _cmd_graph,
    }
    try:
        return handlers[args.command](args)
    except SetSatError as err:
        _emit_error(getattr(args, "fmt", "text"), err)
        return 2
    except (OSError, ValueError, json.JSONDecodeError, RecursionError) as err:
        print(f"error[{type(err).__name__}]: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
