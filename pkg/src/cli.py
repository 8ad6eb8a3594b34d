"""
Command-line surface: gen, solve, check, encode and verify-paper.

Exit codes are a fixed contract:
    0  success / Satisfiable / coloring valid / every claim passed
    1  coloring has violations, a claim failed, or a generated graph is invalid
    2  bad arguments or unreadable input
    10 Exhausted (no coloring with the given palette)
    20 budget exceeded
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from src.config import DEFAULT_K4_FACES, DEFAULT_NODE_BUDGET, DEFAULT_REPORT_PATH, DEFAULT_TIME_BUDGET, get_log_level
from src.fum_core import ColoringError, SolveOptions, check_fum, parse_coloring, serialize_coloring, solve_fum
from src.generators import (
    ConstructionError,
    gen_cycle,
    gen_fig1,
    gen_gadget,
    gen_k4,
    gen_k4_composite,
    gen_path,
    gen_wheel,
)
from src.plane_graph import GraphSyntaxError, GraphValidationError, PlaneGraph, max_degree, parse_graph, serialize_graph
from src.sat_encoder import encode_fum, write_dimacs
from src.search import ResourceLimitExceeded
from src.utils import configure_logging, read_text_file, write_text_file
from src.verification import CLAIMS, VerifyOptions, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 10
EXIT_BUDGET = 20


def _emit(args: argparse.Namespace, text: str, machine: dict) -> None:
    if args.format == "machine":
        print(json.dumps(machine, indent=2, sort_keys=True))
    else:
        print(text)


def _load_graph(path: str) -> PlaneGraph:
    return parse_graph(read_text_file(Path(path)))


def _solve_options(args: argparse.Namespace) -> SolveOptions:
    return SolveOptions(
        strong_pruning=args.strong_pruning == "on",
        node_budget=args.budget_nodes if args.budget_nodes is not None else DEFAULT_NODE_BUDGET,
        time_budget=args.budget_seconds if args.budget_seconds is not None else DEFAULT_TIME_BUDGET,
    )


# --- gen ---

_GENERATORS: Dict[str, Callable[[argparse.Namespace], PlaneGraph]] = {
    "gadget": lambda args: gen_gadget(args.k).graph,
    "fig1": lambda args: gen_fig1(),
    "k4-composite": lambda args: gen_k4_composite(args.faces, args.k),
    "cycle": lambda args: gen_cycle(args.n),
    "k4": lambda args: gen_k4(),
    "wheel": lambda args: gen_wheel(args.n),
    "path": lambda args: gen_path(args.n),
}


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        graph = _GENERATORS[args.target](args)
    except ConstructionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except GraphValidationError as e:
        logger.error(f"Generated graph failed validation: {e}")
        print(f"error: generated graph is invalid: {e}", file=sys.stderr)
        return EXIT_FAILED

    write_text_file(Path(args.out), serialize_graph(graph))
    census = graph.census
    summary = f"V={graph.n} E={graph.num_edges} F={len(census)} Δ={max_degree(graph)}"
    _emit(args, summary, {
        "V": graph.n,
        "E": graph.num_edges,
        "F": len(census),
        "max_degree": max_degree(graph),
        "faces_by_length": {str(length): count for length, count in census.counts_by_length.items()},
        "out": str(args.out),
    })
    return EXIT_OK


# --- solve ---

def cmd_solve(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    try:
        outcome = solve_fum(graph, args.k, _solve_options(args))
    except ResourceLimitExceeded as e:
        stats = e.stats.to_dict() if e.stats else {}
        _emit(args, f"BudgetExceeded: {e}", {"status": "BudgetExceeded", "message": str(e), "stats": stats})
        return EXIT_BUDGET

    stats = outcome.stats
    text = (
        f"{outcome.status.value} (k={args.k})\n"
        f"nodes={stats.nodes_expanded} prunes_proper={stats.prunes_by_properness} "
        f"prunes_face={stats.prunes_by_face_max} time={stats.wall_time:.3f}s"
    )
    if outcome.certificate is not None and args.out:
        write_text_file(Path(args.out), serialize_coloring(outcome.certificate))
        text += f"\ncertificate written to {args.out}"
    _emit(args, text, outcome.to_dict())
    return EXIT_OK if outcome.satisfiable else EXIT_EXHAUSTED


# --- check ---

def cmd_check(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    coloring = parse_coloring(read_text_file(Path(args.coloring)), n=graph.n)
    report = check_fum(graph, coloring)
    _emit(args, report.format_text(graph), report.to_dict())
    return EXIT_OK if report.ok else EXIT_FAILED


# --- encode ---

def cmd_encode(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    formula = encode_fum(graph, args.k)
    write_text_file(Path(args.out), write_dimacs(formula))
    _emit(
        args,
        f"vars={formula.num_vars} clauses={formula.num_clauses}",
        {"vars": formula.num_vars, "clauses": formula.num_clauses, "out": str(args.out)},
    )
    return EXIT_OK


# --- verify-paper ---

def cmd_verify_paper(args: argparse.Namespace) -> int:
    options = VerifyOptions(
        node_budget=args.budget_nodes if args.budget_nodes is not None else DEFAULT_NODE_BUDGET,
        time_budget=args.budget_seconds,
        strong_pruning=args.strong_pruning == "on",
        tamper_gadget=args.tamper_gadget,
        only=tuple(args.only) if args.only else None,
    )
    report = run_verification(options)
    document = report.to_dict()
    write_text_file(Path(args.out), json.dumps(document, indent=2, sort_keys=True) + "\n")
    table = report.format_table()
    _emit(args, table, document)
    if args.format == "machine":
        print(table, file=sys.stderr)
    return EXIT_OK if report.overall else EXIT_FAILED


# --- parser ---

def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-nodes", type=int, default=None, help="Search node budget.")
    common.add_argument("--budget-seconds", type=float, default=None, help="Search wall-time budget.")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--strong-pruning", choices=("on", "off"), default="on")
    common.add_argument("--verbose", action="store_true", help="Log progress at INFO level.")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="fumlab", description="Facial unique-maximum coloring toolkit.")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate a plane graph file.")
    targets = gen.add_subparsers(dest="target", required=True)
    for name, help_text in (("fig1", "two H_1 joined by a4-a2'"), ("k4", "K4 as a wheel")):
        target = targets.add_parser(name, parents=[common], help=help_text)
        target.add_argument("--out", required=True)
    gadget = targets.add_parser("gadget", parents=[common], help="gadget H_k")
    gadget.add_argument("--k", type=int, required=True)
    gadget.add_argument("--out", required=True)
    composite = targets.add_parser("k4-composite", parents=[common], help="K4 with gadgets in selected faces")
    composite.add_argument("--faces", type=int, nargs="+", default=list(DEFAULT_K4_FACES))
    composite.add_argument("--k", type=int, default=1)
    composite.add_argument("--out", required=True)
    for name in ("cycle", "wheel", "path"):
        target = targets.add_parser(name, parents=[common], help=f"{name} on --n vertices")
        target.add_argument("--n", type=int, required=True)
        target.add_argument("--out", required=True)
    gen.set_defaults(handler=cmd_gen)

    solve = commands.add_parser("solve", parents=[common], help="Decide FUM-colorability with palette 1..k.")
    solve.add_argument("graph")
    solve.add_argument("--k", type=int, required=True)
    solve.add_argument("--out", help="Where to write the certificate coloring.")
    solve.set_defaults(handler=cmd_solve)

    check = commands.add_parser("check", parents=[common], help="Check a coloring file against a graph.")
    check.add_argument("graph")
    check.add_argument("coloring")
    check.set_defaults(handler=cmd_check)

    encode = commands.add_parser("encode", parents=[common], help="Write the CNF encoding as DIMACS.")
    encode.add_argument("graph")
    encode.add_argument("--k", type=int, required=True)
    encode.add_argument("--out", required=True)
    encode.set_defaults(handler=cmd_encode)

    verify = commands.add_parser("verify-paper", parents=[common], help="Replay every claim and report.")
    verify.add_argument("--out", default=str(DEFAULT_REPORT_PATH))
    verify.add_argument("--tamper-gadget", action="store_true", help="Remove spoke a1-b1 from the gadget first.")
    verify.add_argument("--only", nargs="+", choices=[claim.id for claim in CLAIMS], help="Run only these claims.")
    verify.set_defaults(handler=cmd_verify_paper)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging("INFO" if args.verbose else get_log_level())
    try:
        return args.handler(args)
    except (FileNotFoundError, GraphSyntaxError, GraphValidationError, ColoringError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
