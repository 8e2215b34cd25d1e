"""Command-line front end.

Exit codes: 0 pass (or a solve that finished), 1 bad input or I/O, 2 a checked
property fails, 3 the check was not decided within its budget or cap.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from blockforge.construct import DEGREE3, STANDARD, BlockParams, BlockParamsError, build_block
from blockforge.graph import GraphInputError, degree_stats
from blockforge.io import DocumentError, dumps, export_dot, parse, serialize
from blockforge.reports import (
    block_report,
    blockers_report,
    distances_report,
    far_pairs_report,
    far_paths_report,
    refusal_report,
    render,
)
from blockforge.search import BUDGET_EXCEEDED, DEFAULT_BUDGET, FarPathQuery, find_far_paths
from blockforge.verify import (
    DEFAULT_SUBSET_CAP,
    DEFAULT_TRIALS,
    EXHAUSTIVE,
    FAIL,
    NOT_VERIFIED,
    PASS,
    SAMPLED,
    CapExceeded,
    cross_validate,
    far_pair_query,
    verify_block,
    verify_blockers,
    verify_distances,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2
EXIT_UNDECIDED = 3

VERDICT_EXIT = {PASS: EXIT_OK, FAIL: EXIT_VIOLATION, NOT_VERIFIED: EXIT_UNDECIDED}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, exit code 2 is reserved for violations
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _budget(raw: str) -> Optional[int]:
    if raw.lower() in ("none", "unlimited"):
        return None
    value = int(raw)
    if value < 0:
        raise argparse.ArgumentTypeError("budget must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="blockforge", description="Build and check (ell, m)-blocks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="write a canonical block document")
    b.add_argument("--ell", type=int, required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--degree3", action="store_true", help="variant with maximum degree three off the root")
    b.add_argument("--depth", type=int, default=None, help="scaffold tree depth (default 2*ell+2)")
    b.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="check block properties and write a report")
    v.add_argument("check", choices=("distances", "blockers", "far-pairs", "all"))
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--report", required=True)
    v.add_argument("--size-bound", type=int, default=None, help="largest blocker set tested (default m-1)")
    v.add_argument("--mode", choices=(EXHAUSTIVE, SAMPLED), default=EXHAUSTIVE)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    v.add_argument("--cap", type=int, default=DEFAULT_SUBSET_CAP, help="exhaustive subset limit")
    v.add_argument("--budget", type=_budget, default=DEFAULT_BUDGET, help="search node limit, or 'none'")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--timing", action="store_true", help="record wall-clock time in the report")

    s = sub.add_parser("solve", help="decide an ad-hoc far-path query")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--exclude-root", action="store_true")
    s.add_argument("--use-counterexample-endpoints", action="store_true", help="add the root to both S and T")
    s.add_argument("--budget", type=_budget, default=DEFAULT_BUDGET)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--report", default=None)
    s.add_argument("--timing", action="store_true")

    e = sub.add_parser("export", help="write Graphviz DOT")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--dot", required=True)

    st = sub.add_parser("stats", help="print counts and the degree histogram")
    st.add_argument("--in", dest="input", required=True)

    o = sub.add_parser("oracle", help="cross-check the search against brute force")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--count", type=int, default=500)
    o.add_argument("--max-vertices", type=int, default=14)
    o.add_argument("--report", default=None)
    return p


def _read_block(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_build(args) -> int:
    variant = DEGREE3 if args.degree3 else STANDARD
    block = build_block(BlockParams(args.ell, args.m, variant, args.depth))
    _write(args.out, serialize(block))
    print(f"wrote {args.out}: {block.graph.vertex_count} vertices, {block.graph.edge_count} edges")
    return EXIT_OK


def _blockers_doc(args, block) -> dict:
    bound = block.params.m - 1 if args.size_bound is None else args.size_bound
    try:
        rep = verify_blockers(
            block, bound, args.mode, seed=args.seed, trials=args.trials, cap=args.cap, workers=args.workers
        )
    except CapExceeded as exc:
        return refusal_report("blockers", {"size_bound": bound, "mode": args.mode}, str(exc))
    return blockers_report(rep)


def _cmd_verify(args) -> int:
    block = _read_block(args.input)
    if args.check == "distances":
        doc = distances_report(verify_distances(block))
    elif args.check == "blockers":
        doc = _blockers_doc(args, block)
    elif args.check == "far-pairs":
        q = far_pair_query(block, args.budget)
        doc = far_pairs_report(q, find_far_paths(block.graph, q, workers=args.workers), args.timing)
    else:
        res = verify_block(
            block,
            budget=args.budget,
            cap=args.cap,
            workers=args.workers,
            size_bound=args.size_bound,
            mode=args.mode,
            seed=args.seed,
            trials=args.trials,
        )
        doc = block_report(res, args.timing)
    _write(args.report, render(doc))
    print(f"{args.check}: {doc['verdict']}")
    if doc["verdict"] == FAIL and doc["witnesses"]:
        print(f"witnesses: {dumps(doc['witnesses']).strip()}")
    return VERDICT_EXIT[doc["verdict"]]


def _cmd_solve(args) -> int:
    block = _read_block(args.input)
    S, T, forbidden = block.S, block.T, ()
    if args.use_counterexample_endpoints and args.exclude_root:
        raise UsageError("--exclude-root and --use-counterexample-endpoints contradict each other")
    if args.use_counterexample_endpoints:
        S, T = tuple(sorted((*S, block.root))), tuple(sorted((*T, block.root)))
    if args.exclude_root:
        forbidden = (block.root,)
    q = FarPathQuery(S, T, args.k, args.c, forbidden, args.budget)
    cert = find_far_paths(block.graph, q, workers=args.workers)
    if args.report:
        _write(args.report, render(far_paths_report(q, cert, args.timing)))
    if cert.found:
        print(f"witness: min pairwise distance {cert.witness.certified_min_pairwise_distance}")
        for p in cert.witness.paths:
            print("  " + " ".join(map(str, p)))
    elif cert.outcome == BUDGET_EXCEEDED:
        print(f"budget exceeded after {cert.stats.nodes} nodes")
        return EXIT_UNDECIDED
    else:
        print(f"no witness ({cert.stats.nodes} nodes)")
    return EXIT_OK


def _cmd_export(args) -> int:
    block = _read_block(args.input)
    _write(args.dot, export_dot(block))
    return EXIT_OK


def _cmd_stats(args) -> int:
    block = _read_block(args.input)
    g = block.graph
    ds = degree_stats(g)
    off_root = max((g.degree(v) for v in range(g.vertex_count) if v != block.root), default=0)
    doc = {
        "ell": block.params.ell,
        "m": block.params.m,
        "variant": block.params.variant,
        "tree_depth": block.params.tree_depth,
        "vertices": g.vertex_count,
        "edges": g.edge_count,
        "S": list(block.S),
        "T": list(block.T),
        "root_degree": g.degree(block.root),
        "max_degree_off_root": off_root,
        "degree_histogram": {str(d): n for d, n in ds.histogram.items()},
    }
    sys.stdout.write(dumps(doc))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    summary = cross_validate(args.seed, args.count, max_vertices=args.max_vertices)
    doc = {
        "seed": summary.seed,
        "count": summary.count,
        "comparisons": summary.comparisons,
        "mismatches": [
            {"index": m.index, "check": m.check, "expected": str(m.expected), "got": str(m.got)}
            for m in summary.mismatches
        ],
    }
    if args.report:
        _write(args.report, dumps(doc))
    print(f"{summary.comparisons} comparisons, {len(summary.mismatches)} mismatches")
    return EXIT_OK if summary.passed else EXIT_VIOLATION


COMMANDS = {
    "build": _cmd_build,
    "verify": _cmd_verify,
    "solve": _cmd_solve,
    "export": _cmd_export,
    "stats": _cmd_stats,
    "oracle": _cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, DocumentError, GraphInputError, BlockParamsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
