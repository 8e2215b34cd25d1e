"""Immutable simple undirected graphs and unweighted distance primitives.

Vertex ids are dense integers ``0..n-1``.  Vertex sets are sorted tuples of
ids; paths are tuples of ids in traversal order.  Unreachable distances are
reported as :data:`INFINITY`.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

INFINITY = math.inf

VertexSet = tuple[int, ...]
Path = tuple[int, ...]

# tag -> number of integer parameters
ROLE_ARITY = {
    "root": 0,
    "tree_node": 2,  # depth, index
    "anchor": 1,  # position
    "spine_internal": 2,  # spine_id, offset
    "base_internal": 2,  # segment, offset
    "port": 2,  # segment_boundary, slot
    "pendant_leaf": 0,
    "fan_tree_internal": 0,
    "plain": 0,
}


class GraphInputError(ValueError):
    """Raised for malformed graphs, vertex ids out of range and similar."""


@dataclass(frozen=True, order=True)
class VertexRole:
    tag: str
    params: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.tag not in ROLE_ARITY:
            raise GraphInputError(f"unknown vertex role {self.tag!r}")
        if len(self.params) != ROLE_ARITY[self.tag]:
            raise GraphInputError(
                f"role {self.tag!r} takes {ROLE_ARITY[self.tag]} parameters, got {self.params!r}"
            )

    def to_list(self) -> list:
        return [self.tag, *self.params]

    @classmethod
    def from_list(cls, raw: Sequence) -> "VertexRole":
        if not raw or not isinstance(raw[0], str):
            raise GraphInputError(f"bad role entry {raw!r}")
        params = tuple(raw[1:])
        if not all(isinstance(p, int) and not isinstance(p, bool) for p in params):
            raise GraphInputError(f"bad role parameters {raw!r}")
        return cls(raw[0], params)

    def __str__(self) -> str:
        if not self.params:
            return self.tag
        return f"{self.tag}({', '.join(map(str, self.params))})"


ROOT = VertexRole("root")
PLAIN = VertexRole("plain")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with sorted adjacency lists and per-vertex roles."""

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    roles: tuple[VertexRole, ...] = field(default=())

    def __post_init__(self) -> None:
        n = self.vertex_count
        if n < 0:
            raise GraphInputError("vertex_count must be nonnegative")
        if len(self.adjacency) != n:
            raise GraphInputError("adjacency must have one entry per vertex")
        if not self.roles:
            object.__setattr__(self, "roles", (PLAIN,) * n)
        elif len(self.roles) != n:
            raise GraphInputError("roles must have one entry per vertex")
        for v, nbrs in enumerate(self.adjacency):
            prev = -1
            for w in nbrs:
                if not 0 <= w < n:
                    raise GraphInputError(f"dangling neighbour {w} of vertex {v}")
                if w == v:
                    raise GraphInputError(f"self-loop at vertex {v}")
                if w <= prev:
                    raise GraphInputError(f"adjacency of {v} not strictly ascending")
                prev = w
        for v, nbrs in enumerate(self.adjacency):
            for w in nbrs:
                if not _contains_sorted(self.adjacency[w], v):
                    raise GraphInputError(f"asymmetric edge {v}-{w}")

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[tuple[int, int]],
        roles: Sequence[VertexRole] = (),
    ) -> "Graph":
        """Build a graph from an edge list.  Duplicate edges are an error."""
        nbrs: list[set[int]] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphInputError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise GraphInputError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise GraphInputError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(vertex_count, tuple(tuple(sorted(s)) for s in nbrs), tuple(roles))

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(u, v)`` with ``u < v``, lexicographically sorted."""
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _contains_sorted(self.adjacency[u], v)

    def with_roles(self, roles: Sequence[VertexRole]) -> "Graph":
        return Graph(self.vertex_count, self.adjacency, tuple(roles))

    def vertices_with_tag(self, tag: str) -> VertexSet:
        return tuple(v for v, r in enumerate(self.roles) if r.tag == tag)

    # bitmask views used by the search code; each bit i stands for vertex i
    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << w for w in nbrs) for nbrs in self.adjacency)

    @cached_property
    def closed_neighbor_masks(self) -> tuple[int, ...]:
        return tuple(m | (1 << v) for v, m in enumerate(self.neighbor_masks))

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.vertex_count) - 1


def _contains_sorted(seq: Sequence[int], x: int) -> bool:
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < len(seq) and seq[lo] == x


def vertex_set(g: Graph, vertices: Iterable[int]) -> VertexSet:
    """Validate ids against ``g`` and return them as a sorted duplicate-free tuple."""
    out = sorted(set(vertices))
    for v in out:
        if not isinstance(v, int) or not 0 <= v < g.vertex_count:
            raise GraphInputError(f"vertex id {v!r} out of range for {g.vertex_count} vertices")
    return tuple(out)


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def from_mask(mask: int) -> VertexSet:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def bfs_distances(
    g: Graph, sources: Iterable[int], forbidden: Iterable[int] = ()
) -> list[float]:
    """Multi-source BFS.  Entry ``v`` is the distance from the nearest source, or INFINITY.

    Forbidden vertices are removed from the graph before the search, sources included.
    """
    blocked = set(forbidden)
    dist: list[float] = [INFINITY] * g.vertex_count
    queue: deque[int] = deque()
    for s in vertex_set(g, sources):
        if s not in blocked:
            dist[s] = 0
            queue.append(s)
    adj = g.adjacency
    while queue:
        v = queue.popleft()
        d = dist[v] + 1
        for w in adj[v]:
            if dist[w] == INFINITY and w not in blocked:
                dist[w] = d
                queue.append(w)
    return dist


def ball(g: Graph, centers: Iterable[int], radius: int) -> VertexSet:
    """Vertices within ``radius`` of some center; empty centers give the empty set."""
    if radius < 0:
        raise GraphInputError("radius must be nonnegative")
    centers = vertex_set(g, centers)
    if not centers:
        return ()
    dist = bfs_distances(g, centers)
    return tuple(v for v, d in enumerate(dist) if d <= radius)


def ball_mask(g: Graph, centers_mask: int, radius: int, allowed: Optional[int] = None) -> int:
    """Bitmask ball; BFS layers are taken inside ``allowed`` when given."""
    nbr = g.neighbor_masks
    if allowed is not None:
        centers_mask &= allowed
    seen = frontier = centers_mask
    for _ in range(radius):
        if not frontier:
            break
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= nbr[low.bit_length() - 1]
            frontier ^= low
        nxt &= ~seen
        if allowed is not None:
            nxt &= allowed
        seen |= nxt
        frontier = nxt
    return seen


def reachable_mask(g: Graph, sources_mask: int, allowed: int) -> int:
    """All vertices reachable from ``sources_mask`` inside the ``allowed`` vertex mask."""
    nbr = g.neighbor_masks
    seen = frontier = sources_mask & allowed
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= nbr[low.bit_length() - 1]
            frontier ^= low
        frontier = nxt & allowed & ~seen
        seen |= frontier
    return seen


def connects(g: Graph, sources_mask: int, targets_mask: int, allowed: int) -> bool:
    """True when some source reaches some target inside ``allowed``."""
    targets_mask &= allowed
    sources_mask &= allowed
    if not targets_mask or not sources_mask:
        return False
    if sources_mask & targets_mask:
        return True
    nbr = g.neighbor_masks
    seen = frontier = sources_mask
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= nbr[low.bit_length() - 1]
            frontier ^= low
        frontier = nxt & allowed & ~seen
        if frontier & targets_mask:
            return True
        seen |= frontier
    return False


def connects_through(g: Graph, sources_mask: int, targets_mask: int, interior: int) -> bool:
    """True when some source reaches some target by a path whose interior lies in ``interior``.

    A vertex in both sets counts as a (trivial) connection.
    """
    if not sources_mask or not targets_mask:
        return False
    if sources_mask & targets_mask:
        return True
    nbr = g.neighbor_masks
    seen = 0
    frontier = sources_mask
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= nbr[low.bit_length() - 1]
            frontier ^= low
        if nxt & targets_mask:
            return True
        frontier = nxt & interior & ~seen
        seen |= frontier
    return False


def distance_between_sets(g: Graph, a: Iterable[int], b: Iterable[int]) -> float:
    """Number of edges on a shortest path with one end in ``a`` and the other in ``b``."""
    a = vertex_set(g, a)
    b = vertex_set(g, b)
    if not a or not b:
        raise GraphInputError("distance between sets needs two nonempty sets")
    dist = bfs_distances(g, a)
    return min(dist[v] for v in b)


def shortest_path_avoiding(
    g: Graph, sources: Iterable[int], targets: Iterable[int], forbidden: Iterable[int] = ()
) -> Optional[Path]:
    """A shortest source-target path in ``g - forbidden``, or None.

    Ties are broken towards the smallest vertex ids, so the result is deterministic.
    """
    blocked = set(vertex_set(g, forbidden))
    srcs = [s for s in vertex_set(g, sources) if s not in blocked]
    tgts = {t for t in vertex_set(g, targets) if t not in blocked}
    if not srcs or not tgts:
        return None
    parent: dict[int, int] = {s: -1 for s in srcs}
    queue = deque(srcs)
    adj = g.adjacency
    hit = None
    while queue:
        v = queue.popleft()
        if v in tgts:
            hit = v
            break
        for w in adj[v]:
            if w not in parent and w not in blocked:
                parent[w] = v
                queue.append(w)
    if hit is None:
        return None
    path = [hit]
    while parent[path[-1]] != -1:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def graph_power(g: Graph, p: int) -> Graph:
    """``u ~ v`` in the result iff ``1 <= dist(u, v) <= p``; roles are kept."""
    if p < 1:
        raise GraphInputError("graph power needs p >= 1")
    if p == 1:
        return g
    adjacency = []
    for v in range(g.vertex_count):
        dist = bfs_distances(g, (v,))
        adjacency.append(tuple(w for w, d in enumerate(dist) if 1 <= d <= p))
    return Graph(g.vertex_count, tuple(adjacency), g.roles)


def path_distance(g: Graph, p: Sequence[int], q: Sequence[int]) -> float:
    """Distance between the vertex sets of two paths, measured by a fresh BFS."""
    return distance_between_sets(g, p, q)


def is_path(g: Graph, path: Sequence[int]) -> bool:
    """Consecutive vertices adjacent, no repeated vertex, nonempty."""
    if not path or len(set(path)) != len(path):
        return False
    if any(not 0 <= v < g.vertex_count for v in path):
        return False
    return all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def is_induced_path(g: Graph, path: Sequence[int]) -> bool:
    if not is_path(g, path):
        return False
    pos = {v: i for i, v in enumerate(path)}
    for i, v in enumerate(path):
        for w in g.adjacency[v]:
            j = pos.get(w)
            if j is not None and abs(i - j) != 1:
                return False
    return True


@dataclass(frozen=True)
class DegreeStats:
    histogram: dict[int, int]
    max_degree: int
    max_degree_vertices: VertexSet


def degree_stats(g: Graph) -> DegreeStats:
    degrees = [len(a) for a in g.adjacency]
    hist = dict(sorted(Counter(degrees).items()))
    top = max(degrees, default=0)
    return DegreeStats(hist, top, tuple(v for v, d in enumerate(degrees) if d == top))
