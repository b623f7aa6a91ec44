"""Command-line surface.

Exit codes: 0 on success, 1 when a domain error surfaces (printed to
stderr as ``ErrorName: message``, no traceback), 2 for usage mistakes
(argparse's own behaviour). Every subcommand delegates to one library
operation, so the CLI adds no semantics of its own.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .associations import CARDINALITY_GLOSS, classify_cardinality
from .core import STANDARD_SCHEMES, Identifier, canonicalize, validate_format
from .errors import Ambiguous, DomainError, NotFound, PreconditionViolated
from .ims import IdentityManagementSystem
from .io.dsl import load_scenario
from .io.events import load_events
from .io.figures import render_figures
from .io.reports import FORMATS, render_report, write_report
from .io.snapshots import load_snapshot
from .io.tables import load_graph, load_pairs, load_table
from .provenance import evaluate_reliability, evaluate_validity, provenance_paths
from .surveillance import SortingReport, WatchContext, social_sort, surveil
from .transform import TransformChain, compose, reduce_ims


def _cmd_validate(args: argparse.Namespace) -> int:
    scheme = STANDARD_SCHEMES.get(args.scheme)
    if scheme is None:
        raise NotFound(
            f"unknown scheme {args.scheme!r} (known: {', '.join(sorted(STANDARD_SCHEMES))})"
        )
    result = validate_format(args.value, scheme)
    if result.valid:
        print(f"valid {result.canonical}")
    else:
        print("invalid")
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    assoc = load_pairs(args.pairs)
    cls = classify_cardinality(assoc)
    print(f"{cls.value} ({CARDINALITY_GLOSS[cls]})")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    model = load_scenario(args.scenario)
    if model.observe is None:
        raise PreconditionViolated(
            "scenario declares no observe binding; add: observe { key = K scheme = S }"
        )
    records = load_events(args.events)
    context = WatchContext(
        attrs=tuple(model.attributes.values()),
        key=model.observe.key,
        scheme=model.schemes[model.observe.scheme],
    )
    report = surveil([r.event for r in records], context)
    categories = social_sort(report, model.sort_keys)
    sorting = SortingReport(report, tuple(categories), model.sort_keys)
    if args.out:
        write_report(sorting, args.out)
    if args.figures:
        render_figures(sorting, args.figures)
    sys.stdout.write(render_report(sorting, args.format))
    return 0


def _cmd_prov(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    if args.paths:
        for path in sorted(provenance_paths(graph, args.node)):
            print(" -> ".join(path))
    elif args.validity:
        print("valid" if evaluate_validity(graph, args.node) else "invalid")
    else:
        print(f"{evaluate_reliability(graph, args.node):.6f}")
    return 0


def _cmd_translate(args: argparse.Namespace) -> int:
    paths = [args.table] + ([p for p in args.chain.split(",") if p] if args.chain else [])
    chain = TransformChain([load_table(p) for p in paths])
    start = Identifier(chain.steps[0].from_scheme, canonicalize(args.value))
    result = compose(chain, start)
    for step in result.trace:
        print(f"{step.table}: {step.source} -> {step.target}")
    print(result.identifier.value)
    return 0


def _pick_system(
    systems: dict[str, IdentityManagementSystem], wanted: str | None, role: str
) -> IdentityManagementSystem:
    if wanted is not None:
        if wanted not in systems:
            raise NotFound(f"{role} snapshot holds no system {wanted!r}")
        return systems[wanted]
    if not systems:
        raise NotFound(f"{role} snapshot holds no systems")
    if len(systems) > 1:
        raise Ambiguous(
            f"{role} snapshot holds {len(systems)} systems "
            f"({', '.join(sorted(systems))}); pick one with --{role}-ims",
            count=len(systems),
        )
    return next(iter(systems.values()))


def _cmd_reduce(args: argparse.Namespace) -> int:
    _, from_systems = load_snapshot(args.from_snap)
    _, to_systems = load_snapshot(args.to_snap)
    a = _pick_system(from_systems, args.from_ims, "from")
    b = _pick_system(to_systems, args.to_ims, "to")
    table = load_table(args.table)
    result = reduce_ims(a, b, table)
    print(f"coverage {float(result.coverage):.6f}")
    print(f"conflicts {result.conflicts}")
    for ident in result.missing:
        print(f"missing {ident}")
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sightline",
        description="Model identifier schemes, identity systems, and observation pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a value against a standard scheme")
    p.add_argument("--scheme", required=True)
    p.add_argument("--value", required=True)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("classify", help="classify the cardinality of a pair file")
    p.add_argument("--pairs", required=True, metavar="FILE.csv")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("run", help="run a scenario over an event log")
    p.add_argument("--scenario", required=True, metavar="FILE.svl")
    p.add_argument("--events", required=True, metavar="FILE.jsonl")
    p.add_argument("--out", metavar="FILE", help="write the canonical structured report here")
    p.add_argument("--format", choices=FORMATS, default="table", help="stdout rendering")
    p.add_argument("--figures", metavar="DIR", help="also render report figures into DIR")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("prov", help="query an identity graph")
    p.add_argument("--graph", required=True, metavar="FILE.jsonl")
    p.add_argument("--node", required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--paths", action="store_true")
    mode.add_argument("--validity", action="store_true")
    mode.add_argument("--reliability", action="store_true")
    p.set_defaults(fn=_cmd_prov)

    p = sub.add_parser("translate", help="map a value through transform tables")
    p.add_argument("--table", required=True, metavar="FILE.csv")
    p.add_argument("--value", required=True)
    p.add_argument("--chain", metavar="FILE2.csv,FILE3.csv", help="further tables, in order")
    p.set_defaults(fn=_cmd_translate)

    p = sub.add_parser("reduce", help="score one snapshotted system against another")
    p.add_argument("--from-snap", required=True, metavar="FILE.json")
    p.add_argument("--to-snap", required=True, metavar="FILE.json")
    p.add_argument("--table", required=True, metavar="FILE.csv")
    p.add_argument("--from-ims", metavar="NAME")
    p.add_argument("--to-ims", metavar="NAME")
    p.set_defaults(fn=_cmd_reduce)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except DomainError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
