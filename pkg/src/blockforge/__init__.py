"""Recursive (ell, m)-blocks and exact checks for far-apart paths."""

from blockforge.construct import (
    DEGREE3,
    STANDARD,
    Block,
    BlockParams,
    CounterexampleInstance,
    anchor_attachment,
    assemble_counterexample,
    block_size_formula,
    build_block,
    build_block_degree3,
    build_l2_explicit,
)
from blockforge.graph import Graph, ball, bfs_distances, graph_power
from blockforge.search import FarPathQuery, SearchCertificate, find_far_paths
from blockforge.verify import (
    brute_force_far_tuples,
    escape_path,
    menger_disjoint_paths,
    verify_block,
    verify_blockers,
    verify_distances,
)

__version__ = "0.1.0"

__all__ = [
    "DEGREE3",
    "STANDARD",
    "Block",
    "BlockParams",
    "CounterexampleInstance",
    "anchor_attachment",
    "assemble_counterexample",
    "block_size_formula",
    "build_block",
    "build_block_degree3",
    "build_l2_explicit",
    "brute_force_far_tuples",
    "escape_path",
    "menger_disjoint_paths",
    "verify_block",
    "verify_blockers",
    "verify_distances",
    "Graph",
    "ball",
    "bfs_distances",
    "graph_power",
    "FarPathQuery",
    "SearchCertificate",
    "find_far_paths",
]
