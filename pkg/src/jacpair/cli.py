"""Command-line entry point: ``jacpair <command> ...``.

Exit status is 0 on success, 1 on a domain failure (no witness,
unrealizable target, failed self-check, degenerate input) and 2 on usage or
input-format errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Sequence

from . import atlas, numtheory
from .divisors import dhar_reduce, format_divisor, parse_divisor
from .errors import (
    DisconnectedGraphError,
    DivisorError,
    GraphError,
    JacpairError,
    PreconditionError,
    SpecError,
)
from .forms import classify
from .graphs import emit_graph, parse_graph
from .jacobian import gram_matrix, jacobian, monodromy_pairing
from .realize import parse_spec, realize_with_log


class UsageError(Exception):
    pass


def fraction_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _read_graph(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path) as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_graph(text)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _factors_text(factors: Sequence[int]) -> str:
    return ",".join(map(str, factors)) if factors else "1"


def cmd_jacobian(args) -> int:
    G = _read_graph(args.graph)
    J = jacobian(G, args.base)
    print(f"factors: {_factors_text(J.invariant_factors)}")
    if args.pretty:
        print(f"order: {J.order}")
        print(f"exponent: {J.exponent}")
        for d, g in zip(J.invariant_factors, J.generators):
            print(f"generator (order {d}): {format_divisor(g) or '0'}")
    return 0


def cmd_pairing(args) -> int:
    G = _read_graph(args.graph)
    n = G.vertex_count
    D1 = parse_divisor(args.d1, n)
    D2 = parse_divisor(args.d2, n)
    value = monodromy_pairing(G, D1, D2, args.base)
    if args.pretty:
        print(f"<D1, D2> = {fraction_text(value)}  (mod 1)")
    else:
        print(fraction_text(value))
    return 0


def cmd_reduce(args) -> int:
    G = _read_graph(args.graph)
    D = parse_divisor(args.divisor, G.vertex_count)
    print(format_divisor(dhar_reduce(G, D, args.base)) or "0")
    return 0


def cmd_classify(args) -> int:
    G = _read_graph(args.graph)
    gamma = gram_matrix(jacobian(G, args.base))
    print(classify(gamma).text())
    if args.pretty:
        print(f"factors: {_factors_text(gamma.orders)}")
        for row in gamma.gram:
            print("gram: " + " ".join(fraction_text(x) for x in row))
    return 0


def cmd_realize(args) -> int:
    try:
        mult = Fraction(args.q_bound_multiplier)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad multiplier {args.q_bound_multiplier!r}") from None
    spec = parse_spec(args.spec, mult)
    G, log = realize_with_log(spec)
    lines = [emit_graph(G), f"# spec: {spec.text()}\n"]
    lines += [f"# block: {entry}\n" for entry in log]
    _write(args.output, "".join(lines))
    return 0


def cmd_verify_q(args) -> int:
    if args.bound < 3:
        raise UsageError("bound must be at least 3")
    report = numtheory.verify_q_range(
        args.bound,
        filter_1mod24=args.filter_1mod24,
        certificates=args.emit_certificates,
        jobs=args.jobs,
    )
    if args.emit_certificates:
        print("\n".join(numtheory.certificate_rows(report)))
    print(report.summary())
    if args.pretty and report.failures:
        print("failures: " + ",".join(map(str, report.failures)))
    return 1 if report.failures else 0


def cmd_census(args) -> int:
    table = atlas.census(args.max_trees, jobs=args.jobs)
    text = atlas.census_tsv(table)
    if args.output and args.output != "-":
        atlas.write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _parse_factors(text: str) -> list[int]:
    try:
        factors = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"factors must be comma-separated integers, got {text!r}") from None
    if not factors or any(d < 1 for d in factors):
        raise UsageError("factors must be positive integers")
    return factors


def cmd_check_absence(args) -> int:
    factors = _parse_factors(args.factors)
    verdict = atlas.check_absence(factors, args.max_trees, atlas.census(args.max_trees, jobs=args.jobs))
    print(verdict.text())
    for r in verdict.witnesses:
        edges = emit_graph(r.canonical_graph).rstrip("\n").replace("\n", ";")
        print(f"witness: {_factors_text(r.invariant_factors)}\t{edges}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jacpair", description="Graph Jacobians and their monodromy pairing.")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("graph", help="graph file ('-' for stdin)")
        p.add_argument("--base", type=int, default=0, help="base vertex (default 0)")
        p.add_argument("--pretty", action="store_true", help="add human-readable decoration")
        return p

    p = graph_cmd("jacobian", "invariant factors of Jac(G)")
    p.set_defaults(func=cmd_jacobian)

    p = graph_cmd("pairing", "monodromy pairing of two degree-0 divisors")
    p.add_argument("--d1", required=True, help='divisor such as "1:1,0:-1"')
    p.add_argument("--d2", required=True)
    p.set_defaults(func=cmd_pairing)

    p = graph_cmd("reduce", "base-reduced representative of a divisor")
    p.add_argument("--divisor", required=True)
    p.set_defaults(func=cmd_reduce)

    p = graph_cmd("classify", "decomposition of Jac(G) with its pairing")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("realize", help="build a graph realizing a decomposition")
    p.add_argument("spec", help='decomposition such as "2^3:C + 5^1:nonres"')
    p.add_argument("-o", "--output", help="graph file to write (default stdout)")
    p.add_argument("--q-bound-multiplier", default="1", help="scale the q-search bound 2*p^(r/2)")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify-q", help="check the nonresidue-prime bound for all primes up to a bound")
    p.add_argument("bound", type=int)
    p.add_argument("--filter-1mod24", action="store_true", help="only primes p = 1 mod 24")
    p.add_argument("--emit-certificates", action="store_true", help="print one 'p q a ratio' row per prime")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_verify_q)

    p = sub.add_parser("census", help="Jacobians of simple 2-edge-connected graphs with few spanning trees")
    p.add_argument("--max-trees", type=int, required=True)
    p.add_argument("-o", "--output", help="TSV file, written atomically (default stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("check-absence", help="is a group the Jacobian of some simple graph?")
    p.add_argument("factors", help='invariant factors such as "2,4"')
    p.add_argument("--max-trees", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check_absence)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DisconnectedGraphError as exc:
        print(f"jacpair {args.command}: {exc}", file=sys.stderr)
        return 1
    except (UsageError, GraphError, SpecError, DivisorError, PreconditionError) as exc:
        print(f"jacpair {args.command}: {exc}", file=sys.stderr)
        return 2
    except JacpairError as exc:
        print(f"jacpair {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
