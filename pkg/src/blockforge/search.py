"""Exact search for k S-T paths that are pairwise at distance at least c.

Completeness rests on two normalisations of any witness tuple:

* every path can be shortcut to an induced path that meets S only in its
  first vertex and T only in its last (or to a single vertex of S & T);
  shortcutting keeps each path inside its old vertex set, so pairwise
  distances never decrease;
* for c >= 1 the paths are disjoint, so after sorting by first vertex the
  first path starts at the smallest start and the others start later.

The search therefore enumerates normalised first paths ``P`` from each start
``s`` and recurses on ``k - 1`` paths starting after ``s`` inside
``V - ball(P, c - 1)`` (``dist(P, Q) >= c`` iff ``Q`` avoids that ball).  The
ball is always taken in the whole graph, forbidden vertices included.  A
partial first path is abandoned once the residual query or the path's own
continuation becomes disconnected; the ball only grows as the path extends,
so this never loses a witness.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from blockforge.graph import (
    Graph,
    GraphInputError,
    Path,
    VertexSet,
    ball_mask,
    bfs_distances,
    connects,
    connects_through,
    distance_between_sets,
    from_mask,
    is_path,
    shortest_path_avoiding,
    to_mask,
    vertex_set,
)

WITNESS = "witness"
EXHAUSTED = "exhausted_no_witness"
BUDGET_EXCEEDED = "budget_exceeded"

DEFAULT_BUDGET = 10**9


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class FarPathQuery:
    S: VertexSet
    T: VertexSet
    k: int
    c: int
    forbidden: VertexSet = ()
    budget: Optional[int] = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if self.k < 1 or self.c < 1:
            raise GraphInputError("k and c must be positive")
        if self.budget is not None and self.budget < 0:
            raise GraphInputError("budget must be nonnegative")


@dataclass(frozen=True)
class FarPathWitness:
    paths: tuple[Path, ...]
    certified_min_pairwise_distance: float


@dataclass
class SearchStats:
    nodes: int = 0
    prunes: Counter = field(default_factory=Counter)
    elapsed: float = 0.0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.prunes.update(other.prunes)

    def as_dict(self, timing: bool = False) -> dict:
        out = {"nodes": self.nodes, "prunes": dict(sorted(self.prunes.items()))}
        if timing:
            out["elapsed_ms"] = int(self.elapsed * 1000)
        return out


@dataclass
class SearchCertificate:
    outcome: str
    witness: Optional[FarPathWitness]
    stats: SearchStats

    @property
    def found(self) -> bool:
        return self.outcome == WITNESS


class _Search:
    """One exact search over a fixed graph, S, T and c."""

    def __init__(self, g: Graph, S: int, T: int, c: int, budget: Optional[int]) -> None:
        self.g = g
        self.c = c
        self.nbr = g.neighbor_masks
        self.cnbr = g.closed_neighbor_masks
        self.balls = [ball_mask(g, 1 << v, c - 1) for v in range(g.vertex_count)]
        self.S_all = S
        self.T_all = T
        self.interior = g.full_mask & ~(S | T)
        self.budget = budget
        self.stats = SearchStats()

    def _tick(self) -> None:
        self.stats.nodes += 1
        if self.budget is not None and self.stats.nodes > self.budget:
            raise BudgetExceeded

    def solve(self, allowed: int, S: int, k: int) -> Optional[list[Path]]:
        """k normalised S-T paths inside ``allowed``, pairwise far; None if impossible."""
        S &= allowed
        T = self.T_all & allowed
        if k == 1:
            return self._single(allowed, S, T)
        if not connects_through(self.g, S, T, allowed & self.interior):
            self.stats.prunes["no_route"] += 1
            return None
        for s in from_mask(S):
            for branch in self.branches(s, allowed, S):
                found = self.explore_branch(branch, allowed, S, k)
                if found is not None:
                    return found
        return None

    def _single(self, allowed: int, S: int, T: int) -> Optional[list[Path]]:
        self._tick()
        if not S or not T:
            return None
        forbidden = from_mask(self.g.full_mask & ~allowed)
        path = shortest_path_avoiding(self.g, from_mask(S), from_mask(T), forbidden)
        return None if path is None else [path]

    def branches(self, s: int, allowed: int, S: int) -> list[Path]:
        """First-path prefixes starting at ``s``: the trivial path or each first edge."""
        if (self.T_all >> s) & 1:
            return [(s,)]
        step_ok = allowed & ~self.S_all
        return [(s, w) for w in from_mask(self.nbr[s] & step_ok)]

    def explore_branch(self, prefix: Path, allowed: int, S: int, k: int) -> Optional[list[Path]]:
        s = prefix[0]
        rest_S = S & ~((2 << s) - 1)
        ballm = 0
        block = 0  # closed neighbourhood of every vertex but the last
        for v in prefix:
            ballm |= self.balls[v]
        for v in prefix[:-1]:
            block |= self.cnbr[v]
        return self._dfs(list(prefix), block, ballm, allowed, rest_S, k)

    def _dfs(
        self, path: list[int], block: int, ballm: int, allowed: int, rest_S: int, k: int
    ) -> Optional[list[Path]]:
        # iterative DFS; each frame is (candidate mask still to try, block, ball)
        T_end = self.T_all & ~self.S_all
        stack: list[tuple[int, int, int]] = []
        frame = self._enter(path, block, ballm, allowed, rest_S, k, T_end)
        if isinstance(frame, list):
            return frame
        if frame is not None:
            stack.append(frame)
        while stack:
            cand, block, ballm = stack[-1]
            if not cand:
                stack.pop()
                path.pop()
                continue
            low = cand & -cand
            stack[-1] = (cand ^ low, block, ballm)
            w = low.bit_length() - 1
            v = path[-1]
            path.append(w)
            frame = self._enter(path, block | self.cnbr[v], ballm | self.balls[w], allowed, rest_S, k, T_end)
            if isinstance(frame, list):
                return frame
            if frame is None:
                path.pop()
            else:
                stack.append(frame)
        return None

    def _enter(self, path, block, ballm, allowed, rest_S, k, T_end):
        """Visit the partial path; return a witness list, a DFS frame, or None to backtrack."""
        self._tick()
        v = path[-1]
        residual = allowed & ~ballm
        if len(path) == 1 and (self.T_all >> v) & 1 or len(path) > 1 and (T_end >> v) & 1:
            rest = self.solve(residual, rest_S, k - 1)
            if rest is None:
                return None
            return [tuple(path), *rest]
        if not connects_through(self.g, rest_S, self.T_all & residual, residual & self.interior):
            self.stats.prunes["residual_disconnected"] += 1
            return None
        region = allowed & ~self.S_all & ~block
        cand = self.nbr[v] & region
        if not cand:
            self.stats.prunes["dead_end"] += 1
            return None
        if not connects(self.g, cand, T_end, (region & ~self.cnbr[v]) | cand):
            self.stats.prunes["continuation_disconnected"] += 1
            return None
        return (cand, block, ballm)


def _validate_query(g: Graph, q: FarPathQuery) -> tuple[int, int, int]:
    S = to_mask(vertex_set(g, q.S))
    T = to_mask(vertex_set(g, q.T))
    forbidden = to_mask(vertex_set(g, q.forbidden))
    return S, T, g.full_mask & ~forbidden


def _run_branch(args) -> tuple[Optional[list[Path]], SearchStats, bool]:
    g, q, prefix, budget = args
    S, T, allowed = _validate_query(g, q)
    search = _Search(g, S, T, q.c, budget)
    try:
        found = search.explore_branch(prefix, allowed, S & allowed, q.k)
    except BudgetExceeded:
        return None, search.stats, True
    return found, search.stats, False


def top_level_branches(g: Graph, q: FarPathQuery) -> list[Path]:
    """Independent top-level branches, in the order the serial search visits them."""
    S, T, allowed = _validate_query(g, q)
    if q.k == 1:
        return []
    search = _Search.__new__(_Search)
    search.g, search.nbr, search.S_all, search.T_all = g, g.neighbor_masks, S, T
    out = []
    for s in from_mask(S & allowed):
        out.extend(search.branches(s, allowed, S & allowed))
    return out


def find_far_paths(g: Graph, q: FarPathQuery, workers: int = 1) -> SearchCertificate:
    """Decide whether ``q.k`` S-T paths avoiding ``q.forbidden`` are pairwise ``>= q.c`` apart.

    The outcome never depends on ``workers``; neither do the reported statistics.
    """
    start = time.perf_counter()
    S, T, allowed = _validate_query(g, q)
    stats = SearchStats()
    found: Optional[list[Path]] = None
    exceeded = False

    if q.k == 1 or not connects(g, S, T, allowed):
        search = _Search(g, S, T, q.c, q.budget)
        try:
            found = search.solve(allowed, S, q.k)
        except BudgetExceeded:
            exceeded = True
        stats = search.stats
    else:
        branches = top_level_branches(g, q)
        if workers <= 1:
            results = _serial_branches(g, q, branches)
        else:
            results = _parallel_branches(g, q, branches, workers)
        found, stats, exceeded = _reduce(results, q.budget)

    stats.elapsed = time.perf_counter() - start
    if exceeded:
        return SearchCertificate(BUDGET_EXCEEDED, None, stats)
    if found is None:
        return SearchCertificate(EXHAUSTED, None, stats)
    paths = tuple(tuple(p) for p in found)
    return SearchCertificate(WITNESS, FarPathWitness(paths, min_pairwise_distance(g, paths)), stats)


def _serial_branches(g, q, branches):
    used = 0
    for prefix in branches:
        budget = None if q.budget is None else max(q.budget - used, 0)
        res = _run_branch((g, q, prefix, budget))
        yield res
        used += res[1].nodes
        if res[0] is not None or res[2]:
            return


def _parallel_branches(g, q, branches, workers):
    jobs = [(g, q, prefix, q.budget) for prefix in branches]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_branch, jobs, chunksize=1)


def _reduce(results: Iterable, budget: Optional[int]):
    """Fold branch results in branch order, stopping at the first witness or overrun."""
    total = SearchStats()
    for found, stats, exceeded in results:
        if exceeded or (budget is not None and total.nodes + stats.nodes > budget):
            done = SearchStats(nodes=(budget or 0) + 1, prunes=total.prunes)
            return None, done, True
        total.merge(stats)
        if found is not None:
            return found, total, False
    return None, total, False


def min_pairwise_distance(g: Graph, paths: Sequence[Sequence[int]]) -> float:
    """Smallest distance between two of the paths, by fresh BFS (inf for a single path)."""
    best = float("inf")
    for i in range(len(paths)):
        dist = bfs_distances(g, paths[i])
        for j in range(i + 1, len(paths)):
            best = min(best, min(dist[v] for v in paths[j]))
    return best


def validate_witness(g: Graph, q: FarPathQuery, witness: FarPathWitness) -> list[str]:
    """Independent re-check of a witness; returns a list of problems (empty when valid)."""
    problems = []
    S, T, forbidden = set(q.S), set(q.T), set(q.forbidden)
    if len(witness.paths) != q.k:
        problems.append(f"expected {q.k} paths, got {len(witness.paths)}")
    for i, p in enumerate(witness.paths):
        if not is_path(g, p):
            problems.append(f"path {i} is not a path of the graph")
            continue
        if p[0] not in S or p[-1] not in T:
            problems.append(f"path {i} does not run from S to T")
        if forbidden & set(p):
            problems.append(f"path {i} uses a forbidden vertex")
    for i in range(len(witness.paths)):
        for j in range(i + 1, len(witness.paths)):
            d = distance_between_sets(g, witness.paths[i], witness.paths[j])
            if d < q.c:
                problems.append(f"paths {i} and {j} at distance {d} < {q.c}")
    return problems
