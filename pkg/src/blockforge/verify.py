"""Verifiers for block properties, plus independent oracles.

* :func:`verify_distances` measures the metric spread of ``{r} + S + T``.
* :func:`verify_blockers` checks that no small vertex set, together with the
  root, comes within ``ell`` of every S-T path.
* :func:`verify_block` runs both and the far-pair search.
* :func:`brute_force_far_tuples` and :func:`menger_disjoint_paths` are oracles
  that share no code with the exact search.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import networkx as nx

from blockforge.construct import Block
from blockforge.graph import (
    INFINITY,
    Graph,
    GraphInputError,
    Path,
    VertexSet,
    ball,
    ball_mask,
    bfs_distances,
    connects,
    from_mask,
    shortest_path_avoiding,
    to_mask,
    vertex_set,
)
from blockforge.search import (
    DEFAULT_BUDGET,
    EXHAUSTED,
    WITNESS,
    FarPathQuery,
    SearchCertificate,
    find_far_paths,
)

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"
DEFAULT_SUBSET_CAP = 10**8
DEFAULT_TRIALS = 2000
BRUTE_FORCE_MAX_VERTICES = 14

ALL_ESCAPED = "all_escaped"
COVERED = "covered"

PASS = "pass"
FAIL = "fail"
NOT_VERIFIED = "not_verified"


class CapExceeded(Exception):
    """An exhaustive check would need more work than the configured cap allows."""


# ---------------------------------------------------------------- distances


@dataclass(frozen=True)
class DistanceReport:
    labels: tuple[str, ...]
    vertices: VertexSet
    matrix: tuple[tuple[float, ...], ...]
    min_within_terminals: float
    root_to_terminals: float
    required_within: int
    required_root: int

    @property
    def passed(self) -> bool:
        return self.min_within_terminals >= self.required_within and self.root_to_terminals >= self.required_root


def verify_distances(b: Block) -> DistanceReport:
    """Exact BFS distances over ``{root} + S + T``.

    Terminals must be ``2*ell + 1`` apart.  The root is only required to be
    ``2*ell`` away, which is what the construction actually achieves.
    """
    g, ell = b.graph, b.params.ell
    verts = (b.root, *b.S, *b.T)
    labels = ("r", *(f"S{i}" for i in range(len(b.S))), *(f"T{i}" for i in range(len(b.T))))
    rows = []
    for v in verts:
        dist = bfs_distances(g, (v,))
        rows.append(tuple(dist[w] for w in verts))
    terminals = range(1, len(verts))
    within = min((rows[i][j] for i in terminals for j in terminals if i < j), default=INFINITY)
    root_gap = min((rows[0][j] for j in terminals), default=INFINITY)
    return DistanceReport(labels, verts, tuple(rows), within, root_gap, 2 * ell + 1, 2 * ell)


# ----------------------------------------------------------------- blockers


def escape_path(
    g: Graph,
    root: Optional[int],
    X: Iterable[int],
    ell: int,
    S: Iterable[int],
    T: Iterable[int],
) -> Optional[Path]:
    """An S-T path at distance more than ``ell`` from ``X + {root}``, or None."""
    if ell < 0:
        raise GraphInputError("ell must be nonnegative")
    centers = set(vertex_set(g, X))
    if root is not None:
        centers.add(root)
    covered = ball(g, centers, ell)
    return shortest_path_avoiding(g, S, T, covered)


@dataclass
class BlockerReport:
    size_bound: int
    mode: str
    verdict: str
    covering_set: Optional[VertexSet] = None
    seed: Optional[int] = None
    trials: int = 0
    subsets_tested: int = 0
    by_size: dict[int, int] = field(default_factory=dict)
    witnesses: dict[VertexSet, Path] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == ALL_ESCAPED


class _EscapeChecker:
    """Escape tests on one block with cached per-vertex balls and reusable routes."""

    def __init__(self, b: Block) -> None:
        g = b.graph
        self.g = g
        self.ell = b.params.ell
        self.balls = [ball_mask(g, 1 << v, self.ell) for v in range(g.vertex_count)]
        self.base = self.balls[b.root]
        self.S = to_mask(b.S)
        self.T = to_mask(b.T)
        self.full = g.full_mask
        self.routes: dict[VertexSet, int] = {}

    def covered(self, X: Sequence[int]) -> int:
        m = self.base
        for x in X:
            m |= self.balls[x]
        return m

    def escapes(self, X: VertexSet) -> bool:
        """True when some S-T path avoids the balls; routes of X's prefix are tried first."""
        cov = self.covered(X)
        prefix = X[:-1]
        route = self.routes.get(prefix)
        if route is not None and not route & cov:
            return True
        free = self.full & ~cov
        if not connects(self.g, self.S & free, self.T & free, free):
            return False
        path = shortest_path_avoiding(self.g, from_mask(self.S), from_mask(self.T), from_mask(cov))
        self.routes[X] = to_mask(path)
        return True

    def path_for(self, X: VertexSet) -> Optional[Path]:
        return shortest_path_avoiding(self.g, from_mask(self.S), from_mask(self.T), from_mask(self.covered(X)))


def subset_count(n: int, size_bound: int) -> int:
    return sum(math.comb(n, i) for i in range(size_bound + 1))


def _exhaustive_chunk(args) -> tuple[Optional[VertexSet], int]:
    """Subsets of one size whose smallest element lies in ``firsts``; first covering set in lex order."""
    b, size, firsts = args
    checker = _EscapeChecker(b)
    n = b.graph.vertex_count
    if size == 0:
        return (None if checker.escapes(()) else ()), 1
    tested = 0
    for first in firsts:
        for tail in itertools.combinations(range(first + 1, n), size - 1):
            X = (first, *tail)
            # the prefix route must be cached before X can reuse it
            if len(X) >= 2 and X[:-1] not in checker.routes and not checker.escapes(X[:-1]):
                return X[:-1], tested
            tested += 1
            if not checker.escapes(X):
                return X, tested
    return None, tested


def _exhaustive_jobs(b: Block, size_bound: int, pieces: int) -> list[tuple]:
    n = b.graph.vertex_count
    jobs = [(b, 0, range(0))]
    for size in range(1, size_bound + 1):
        firsts = range(n - size + 1)
        step = max(1, -(-len(firsts) // pieces))
        jobs.extend((b, size, firsts[i : i + step]) for i in range(0, len(firsts), step))
    return jobs


def verify_blockers(
    b: Block,
    size_bound: int,
    mode: str = EXHAUSTIVE,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    cap: int = DEFAULT_SUBSET_CAP,
    workers: int = 1,
    keep_witnesses: bool = False,
) -> BlockerReport:
    """Look for ``X`` with ``|X| <= size_bound`` such that ``X + {root}`` covers every S-T path.

    Exhaustive mode refuses with :class:`CapExceeded` rather than falling back to
    sampling.  Sampled mode tests seeded uniform subsets of size ``size_bound``
    followed by a fixed adversarial battery.
    """
    if size_bound < 0:
        raise GraphInputError("size_bound must be nonnegative")
    n = b.graph.vertex_count
    if mode == EXHAUSTIVE:
        total = subset_count(n, size_bound)
        if total > cap:
            raise CapExceeded(f"{total} subsets exceed the cap of {cap}")
        report = BlockerReport(size_bound, mode, ALL_ESCAPED)
        jobs = _exhaustive_jobs(b, size_bound, 4 * workers if workers > 1 else 1)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_exhaustive_chunk, jobs))
        else:
            results = map(_exhaustive_chunk, jobs)
        for (_, size, _), (bad, tested) in zip(jobs, results):
            report.subsets_tested += tested
            report.by_size[size] = report.by_size.get(size, 0) + tested
            if bad is not None:
                report.verdict, report.covering_set = COVERED, bad
                break
        if keep_witnesses and report.passed:
            checker = _EscapeChecker(b)
            for size in range(size_bound + 1):
                for X in itertools.combinations(range(n), size):
                    report.witnesses[X] = checker.path_for(X)
        return report
    if mode != SAMPLED:
        raise GraphInputError(f"unknown blocker mode {mode!r}")
    report = BlockerReport(size_bound, mode, ALL_ESCAPED, seed=seed, trials=trials)
    checker = _EscapeChecker(b)
    rng = random.Random(seed)
    candidates = [tuple(sorted(rng.sample(range(n), min(size_bound, n)))) for _ in range(trials)]
    candidates.extend(adversarial_battery(b, size_bound))
    for X in candidates:
        report.subsets_tested += 1
        report.by_size[len(X)] = report.by_size.get(len(X), 0) + 1
        if not checker.escapes(X):
            report.verdict, report.covering_set = COVERED, X
            break
        if keep_witnesses:
            report.witnesses[X] = checker.path_for(X)
    return report


def adversarial_battery(b: Block, size_bound: int, pool_limit: int = 100_000) -> list[VertexSet]:
    """Deterministic sets aimed at the likely weak spots of a block.

    Centers are drawn from the terminals, the port and anchor vertices, the root's
    neighbours and the highest-degree vertices; every combination of the pool is
    tried, shrinking the pool until the combination count fits ``pool_limit``.
    """
    g = b.graph
    if size_bound == 0:
        return [()]
    hubs = sorted((v for v in range(g.vertex_count) if v != b.root), key=lambda v: (-g.degree(v), v))
    ports = [v for v, r in enumerate(g.roles) if r.tag in ("anchor", "port")]
    pool: list[int] = []
    for v in (*b.S, *b.T, *g.adjacency[b.root], *ports, *hubs):
        if v not in pool:
            pool.append(v)
    while len(pool) > size_bound and math.comb(len(pool), size_bound) > pool_limit:
        pool.pop()
    return [tuple(sorted(X)) for X in itertools.combinations(pool, min(size_bound, len(pool)))]


# ---------------------------------------------------------------- composite


@dataclass
class BlockVerification:
    distances: DistanceReport
    blockers: Optional[BlockerReport]
    blockers_refusal: Optional[str]
    far_pairs: SearchCertificate
    far_pairs_query: FarPathQuery

    @property
    def verdict(self) -> str:
        if not self.distances.passed:
            return FAIL
        if self.blockers is not None and not self.blockers.passed:
            return FAIL
        if self.far_pairs.outcome == WITNESS:
            return FAIL
        if self.blockers is None or self.far_pairs.outcome != EXHAUSTED:
            return NOT_VERIFIED
        return PASS


def far_pair_query(b: Block, budget: Optional[int] = DEFAULT_BUDGET) -> FarPathQuery:
    return FarPathQuery(b.S, b.T, 2, 3, (b.root,), budget)


def verify_block(
    b: Block,
    budget: Optional[int] = DEFAULT_BUDGET,
    cap: int = DEFAULT_SUBSET_CAP,
    workers: int = 1,
    size_bound: Optional[int] = None,
    mode: str = EXHAUSTIVE,
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
) -> BlockVerification:
    """Distances, blockers (``size_bound`` defaults to ``m - 1``) and the k=2, c=3 far-pair search.

    A cap refusal leaves the blocker check undecided, never passed.
    """
    dist = verify_distances(b)
    bound = b.params.m - 1 if size_bound is None else size_bound
    blockers, refusal = None, None
    try:
        blockers = verify_blockers(b, bound, mode, seed=seed, trials=trials, cap=cap, workers=workers)
    except CapExceeded as exc:
        refusal = str(exc)
    q = far_pair_query(b, budget)
    cert = find_far_paths(b.graph, q, workers=workers)
    return BlockVerification(dist, blockers, refusal, cert, q)


# ------------------------------------------------------------------ oracles


def _all_simple_paths(g: Graph, S: VertexSet, T: VertexSet, forbidden: set[int]) -> list[Path]:
    """Every simple path that starts in S and ends in T, including single vertices of S & T."""
    targets = set(T)
    out: list[Path] = []
    adj = g.adjacency

    def extend(path: list[int], seen: set[int]) -> None:
        if path[-1] in targets:
            out.append(tuple(path))
        for w in adj[path[-1]]:
            if w not in seen and w not in forbidden:
                seen.add(w)
                path.append(w)
                extend(path, seen)
                path.pop()
                seen.discard(w)

    for s in S:
        if s not in forbidden:
            extend([s], {s})
    return out


def brute_force_far_tuples(
    g: Graph,
    S: Iterable[int],
    T: Iterable[int],
    k: int,
    c: int,
    forbidden: Iterable[int] = (),
) -> Optional[tuple[Path, ...]]:
    """First k-tuple (in enumeration order) of S-T paths pairwise at distance >= c, or None.

    Walks all simple paths and all k-subsets of them; only for graphs of at most
    fourteen vertices.
    """
    if g.vertex_count > BRUTE_FORCE_MAX_VERTICES:
        raise GraphInputError(f"brute force is limited to {BRUTE_FORCE_MAX_VERTICES} vertices")
    if k < 1 or c < 1:
        raise GraphInputError("k and c must be positive")
    paths = _all_simple_paths(g, vertex_set(g, S), vertex_set(g, T), set(vertex_set(g, forbidden)))
    masks = [to_mask(p) for p in paths]
    near = []
    for p in paths:
        dist = bfs_distances(g, p)
        near.append(to_mask(v for v, d in enumerate(dist) if d < c))

    def grow(chosen: list[int], start: int) -> Optional[list[int]]:
        if len(chosen) == k:
            return chosen
        for j in range(start, len(paths)):
            if all(not masks[j] & near[i] for i in chosen):
                found = grow(chosen + [j], j + 1)
                if found is not None:
                    return found
        return None

    found = grow([], 0)
    return None if found is None else tuple(paths[i] for i in found)


def menger_disjoint_paths(g: Graph, S: Iterable[int], T: Iterable[int]) -> tuple[int, VertexSet]:
    """Maximum number of vertex-disjoint S-T paths and a minimum S-T vertex cut.

    Vertices of ``S & T`` are single-vertex paths and always belong to the cut;
    the rest is unit-capacity max-flow on the remaining graph.
    """
    S, T = set(vertex_set(g, S)), set(vertex_set(g, T))
    shared = S & T
    S -= shared
    T -= shared
    h = nx.Graph()
    h.add_nodes_from(v for v in range(g.vertex_count) if v not in shared)
    h.add_edges_from((u, v) for u, v in g.edges() if u not in shared and v not in shared)
    src, snk = "source", "sink"
    h.add_edges_from((src, s) for s in sorted(S))
    h.add_edges_from((t, snk) for t in sorted(T))
    if not S or not T or not nx.has_path(h, src, snk):
        return len(shared), tuple(sorted(shared))
    cut = nx.minimum_node_cut(h, src, snk)
    return len(shared) + len(cut), tuple(sorted(shared | cut))


def max_feasible_k(g: Graph, S: Iterable[int], T: Iterable[int], c: int, limit: Optional[int] = None) -> int:
    """Largest k for which ``find_far_paths`` finds k pairwise far S-T paths."""
    S, T = vertex_set(g, S), vertex_set(g, T)
    top = limit if limit is not None else len(set(S) | set(T))
    best = 0
    for k in range(1, top + 1):
        cert = find_far_paths(g, FarPathQuery(S, T, k, c, budget=None))
        if cert.outcome != WITNESS:
            break
        best = k
    return best


# ------------------------------------------------------------ oracle corpus


@dataclass(frozen=True)
class OracleInstance:
    graph: Graph
    S: VertexSet
    T: VertexSet


def random_instance(seed: int, index: int, max_vertices: int = BRUTE_FORCE_MAX_VERTICES) -> OracleInstance:
    """Sparse random graph with small random terminal sets; a pure function of ``(seed, index)``."""
    rng = random.Random(f"{seed}:{index}")
    n = rng.randint(2, max_vertices)
    p = rng.uniform(1.0, 2.6) / max(n - 1, 1)
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    S = sorted(rng.sample(range(n), rng.randint(1, min(3, n))))
    T = sorted(rng.sample(range(n), rng.randint(1, min(3, n))))
    return OracleInstance(Graph.from_edges(n, edges), tuple(S), tuple(T))


@dataclass
class OracleMismatch:
    index: int
    check: str
    expected: object
    got: object


@dataclass
class OracleSummary:
    seed: int
    count: int
    comparisons: int = 0
    mismatches: list[OracleMismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def cross_validate(
    seed: int,
    count: int,
    ks: Sequence[int] = (1, 2),
    cs: Sequence[int] = (1, 2, 3),
    max_vertices: int = BRUTE_FORCE_MAX_VERTICES,
) -> OracleSummary:
    """Compare the exact search with brute force, and Menger with the search at c=1."""
    summary = OracleSummary(seed, count)
    for index in range(count):
        inst = random_instance(seed, index, max_vertices)
        g, S, T = inst.graph, inst.S, inst.T
        for k in ks:
            for c in cs:
                cert = find_far_paths(g, FarPathQuery(S, T, k, c, budget=None))
                truth = brute_force_far_tuples(g, S, T, k, c) is not None
                summary.comparisons += 1
                if cert.found != truth:
                    summary.mismatches.append(OracleMismatch(index, f"k={k},c={c}", truth, cert.found))
        count_m, cut = menger_disjoint_paths(g, S, T)
        top = find_far_paths(g, FarPathQuery(S, T, count_m, 1, budget=None)).found if count_m else True
        over = find_far_paths(g, FarPathQuery(S, T, count_m + 1, 1, budget=None)).found
        summary.comparisons += 1
        if not top or over or len(cut) != count_m:
            summary.mismatches.append(OracleMismatch(index, "menger", count_m, (top, over, len(cut))))
    return summary
