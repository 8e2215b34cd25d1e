"""Recursive (ell, m)-block construction.

A block is a quadruple ``(G, r, S, T)``.  The (ell, 1)-block is a path of
length ``2*ell + 1`` between ``s`` and ``t`` plus an isolated root.  An
(ell, m)-block is assembled from ``n - 1`` copies of an (ell, m-1)-block
chained through port sets ``V_1..V_n`` of size ``m - 1``, a binary tree ``J``
whose root is the shared root, and spines of length ``2*ell + 1`` joining each
leaf of ``J`` to the ports at its two attachment positions.

Vertex ids are assigned in construction order: root, tree nodes level by
level, ports position by position, spine interiors leaf by leaf, then the
new vertices of each copy from left to right.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence

from blockforge.graph import (
    ROOT,
    Graph,
    GraphInputError,
    VertexRole,
    VertexSet,
)

STANDARD = "standard"
DEGREE3 = "degree3"
VARIANTS = (STANDARD, DEGREE3)


class BlockParamsError(ValueError):
    pass


@dataclass(frozen=True)
class BlockParams:
    ell: int
    m: int
    variant: str = STANDARD
    tree_depth: Optional[int] = None

    def __post_init__(self) -> None:
        if not isinstance(self.ell, int) or self.ell < 1:
            raise BlockParamsError(f"ell must be a positive integer, got {self.ell!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise BlockParamsError(f"m must be a positive integer, got {self.m!r}")
        if self.variant not in VARIANTS:
            raise BlockParamsError(f"unknown variant {self.variant!r}")
        if self.tree_depth is None:
            object.__setattr__(self, "tree_depth", 2 * self.ell + 2)
        elif self.tree_depth < 2 * self.ell + 2:
            raise BlockParamsError(
                f"tree_depth must be at least 2*ell+2 = {2 * self.ell + 2}, got {self.tree_depth}"
            )

    @property
    def spine_length(self) -> int:
        return 2 * self.ell + 1

    @property
    def anchor_count(self) -> int:
        """Number of anchor positions ``n`` per recursion level."""
        return 2 ** (self.tree_depth - 1)

    def with_m(self, m: int) -> "BlockParams":
        return replace(self, m=m)


@dataclass(frozen=True)
class Block:
    graph: Graph
    root: int
    S: VertexSet
    T: VertexSet
    params: BlockParams

    def __post_init__(self) -> None:
        g = self.graph
        if not 0 <= self.root < g.vertex_count:
            raise GraphInputError("root id out of range")
        for name in ("S", "T"):
            vs = getattr(self, name)
            if list(vs) != sorted(set(vs)):
                raise GraphInputError(f"{name} must be sorted and duplicate-free")
            if any(not 0 <= v < g.vertex_count for v in vs):
                raise GraphInputError(f"{name} contains an out-of-range vertex id")
            if len(vs) != self.params.m:
                raise GraphInputError(f"|{name}| = {len(vs)}, expected m = {self.params.m}")
        if set(self.S) & set(self.T) or self.root in self.S or self.root in self.T:
            raise GraphInputError("S, T and the root must be pairwise disjoint")
        roots = g.vertices_with_tag("root")
        if roots != (self.root,):
            raise GraphInputError(f"expected exactly one root-tagged vertex at {self.root}, found {roots}")


@dataclass(frozen=True)
class CounterexampleInstance:
    """``S' = S + {r}``, ``T' = T + {r}`` over a block with ``m = m_blocker + 1``."""

    graph: Graph
    S_prime: VertexSet
    T_prime: VertexSet
    ell: int
    m_blocker: int
    root: int
    block: Block = field(repr=False)


class _Builder:
    def __init__(self) -> None:
        self.roles: list[VertexRole] = []
        self.edges: list[tuple[int, int]] = []

    def vertex(self, role: VertexRole) -> int:
        self.roles.append(role)
        return len(self.roles) - 1

    def edge(self, u: int, v: int) -> None:
        self.edges.append((u, v))

    def path(self, a: int, b: int, length: int, role_of_offset) -> list[int]:
        """Join ``a`` to ``b`` by a new path of ``length`` edges; interiors numbered from ``a``."""
        prev = a
        interior = []
        for off in range(1, length):
            v = self.vertex(role_of_offset(off))
            self.edge(prev, v)
            interior.append(v)
            prev = v
        self.edge(prev, b)
        return interior

    def graph(self) -> Graph:
        return Graph.from_edges(len(self.roles), self.edges, self.roles)


def anchor_attachment(k: int, n: int) -> tuple[int, int]:
    """Anchor positions wired to the ``k``-th leaf of the scaffold tree (1-based).

    Leaf ``k`` reaches positions ``2k-2`` and ``2k+1``, clipped to ``1..n``, so that
    every position is hit exactly once.
    """
    if n < 4 or n & (n - 1):
        raise BlockParamsError(f"anchor count must be a power of two >= 4, got {n}")
    if not 1 <= k <= n // 2:
        raise BlockParamsError(f"leaf index {k} outside 1..{n // 2}")
    return max(1, 2 * k - 2), min(n, 2 * k + 1)


def _scaffold_tree(b: _Builder, tree_depth: int) -> list[int]:
    """Add the root and the plain binary tree ``J``; return its leaves left to right."""
    root = b.vertex(ROOT)
    level = [root]
    for depth in range(1, tree_depth - 1):
        nxt = []
        for idx in range(2 ** depth):
            v = b.vertex(VertexRole("tree_node", (depth, idx)))
            b.edge(level[idx // 2], v)
            nxt.append(v)
        level = nxt
    return level


def _base_block(params: BlockParams) -> Block:
    b = _Builder()
    root = b.vertex(ROOT)
    s = b.vertex(VertexRole("anchor", (1,)))
    interior = [b.vertex(VertexRole("base_internal", (1, off))) for off in range(1, params.spine_length)]
    t = b.vertex(VertexRole("anchor", (2,)))
    chain = [s, *interior, t]
    for u, v in zip(chain, chain[1:]):
        b.edge(u, v)
    S, T = [s], [t]
    if params.variant == DEGREE3:
        S, T = _attach_pendants(b, S), _attach_pendants(b, T)
    return Block(b.graph(), root, tuple(S), tuple(T), params)


def _attach_pendants(b: _Builder, vertices: Sequence[int]) -> list[int]:
    out = []
    for v in sorted(vertices):
        leaf = b.vertex(VertexRole("pendant_leaf"))
        b.edge(v, leaf)
        out.append(leaf)
    return out


def _fan(b: _Builder, top: int, leaves: Sequence[int], length: int, used: int = 0) -> None:
    """Balanced binary tree from ``top`` to ``leaves``; every top-to-leaf path has ``length`` edges.

    ``top`` gets a single edge into the tree, every branch node has two children.
    """
    if len(leaves) == 1:
        b.path(top, leaves[0], length - used, lambda off: VertexRole("fan_tree_internal"))
        return
    if length - used < 2:
        raise BlockParamsError("fan tree too deep for the spine length")
    node = b.vertex(VertexRole("fan_tree_internal"))
    b.edge(top, node)
    half = (len(leaves) + 1) // 2
    _fan(b, node, leaves[:half], length, used + 1)
    _fan(b, node, leaves[half:], length, used + 1)


def _segment_count(h: Block) -> int:
    return max(r.params[0] for r in h.graph.roles if r.tag == "base_internal")


def _recursive_block(params: BlockParams, inner: Block) -> Block:
    m, n = params.m, params.anchor_count
    L = params.spine_length
    b = _Builder()
    leaves = _scaffold_tree(b, params.tree_depth)
    root = 0

    ports: dict[int, list[int]] = {}
    for i in range(1, n + 1):
        if m == 2:
            ports[i] = [b.vertex(VertexRole("anchor", (i,)))]
        else:
            ports[i] = [b.vertex(VertexRole("port", (i, slot))) for slot in range(m - 1)]

    spine_id = 0
    for k, u in enumerate(leaves, start=1):
        left, right = anchor_attachment(k, n)
        if params.variant == DEGREE3:
            if k in (1, n // 2):
                # u also carries a pendant, so the two groups split one step below u;
                # the hub stays 2*ell + 1 away from every port so no single ball
                # holds both the hub and a port
                hub = b.vertex(VertexRole("fan_tree_internal"))
                b.edge(u, hub)
                _fan(b, hub, ports[left], L)
                _fan(b, hub, ports[right], L)
            else:
                _fan(b, u, ports[left], L)
                _fan(b, u, ports[right], L)
            continue
        for pos in (left, right):
            for p in ports[pos]:
                spine_id += 1
                sid = spine_id
                b.path(u, p, L, lambda off, sid=sid: VertexRole("spine_internal", (sid, off)))

    segs = _segment_count(inner)
    h = inner.graph
    for i in range(1, n):
        mapping = {inner.root: root}
        mapping.update(zip(inner.S, ports[i]))
        mapping.update(zip(inner.T, ports[i + 1]))
        for v in range(h.vertex_count):
            if v in mapping:
                continue
            role = h.roles[v]
            if role.tag == "base_internal":
                role = VertexRole("base_internal", ((i - 1) * segs + role.params[0], role.params[1]))
            mapping[v] = b.vertex(role)
        for u, v in h.edges():
            b.edge(mapping[u], mapping[v])

    s0, t0 = leaves[0], leaves[-1]
    S = [*ports[1], s0]
    T = [*ports[n], t0]
    if params.variant == DEGREE3:
        S, T = _attach_pendants(b, S), _attach_pendants(b, T)
    return Block(b.graph(), root, tuple(sorted(S)), tuple(sorted(T)), params)


def build_block(params: BlockParams) -> Block:
    """Build the (ell, m)-block for ``params`` by recursion on ``m``."""
    block = _base_block(params.with_m(1))
    for m in range(2, params.m + 1):
        block = _recursive_block(params.with_m(m), block)
    return block


def build_block_degree3(params: BlockParams) -> Block:
    """Variant where every vertex other than the root has degree at most three.

    Terminals become pendant leaves, and each group of spines from a tree leaf
    becomes a balanced binary fan of depth ``2*ell + 1``.  The two end leaves of
    ``J`` already carry a pendant, so their two fans hang from a hub one step
    below the leaf.  Merging the two groups into a single fan instead creates a
    short cut between port sets and breaks the far-pair property.
    """
    return build_block(replace(params, variant=DEGREE3))


def build_l2_explicit(ell: int, tree_depth: Optional[int] = None) -> Block:
    """The (ell, 2)-block drawn directly: tree, leaf-to-anchor spines and the base path.

    Independent of :func:`build_block`; used to cross-check it.
    """
    params = BlockParams(ell, 2, STANDARD, tree_depth)
    n, L = params.anchor_count, params.spine_length
    b = _Builder()
    leaves = _scaffold_tree(b, params.tree_depth)
    anchors = [b.vertex(VertexRole("anchor", (i,))) for i in range(1, n + 1)]
    spine_id = 0
    for k, u in enumerate(leaves, start=1):
        for pos in anchor_attachment(k, n):
            spine_id += 1
            sid = spine_id
            b.path(u, anchors[pos - 1], L, lambda off, sid=sid: VertexRole("spine_internal", (sid, off)))
    for seg in range(1, n):
        b.path(anchors[seg - 1], anchors[seg], L, lambda off, seg=seg: VertexRole("base_internal", (seg, off)))
    S = sorted((anchors[0], leaves[0]))
    T = sorted((anchors[-1], leaves[-1]))
    return Block(b.graph(), 0, tuple(S), tuple(T), params)


def assemble_counterexample(
    ell: int, m_blocker: int, variant: str = STANDARD, tree_depth: Optional[int] = None
) -> CounterexampleInstance:
    """No three S'-T' paths are pairwise at distance >= 3, yet no ``m_blocker`` balls of
    radius ``ell`` meet every S'-T' path."""
    if m_blocker < 1:
        raise BlockParamsError("m_blocker must be at least 1")
    block = build_block(BlockParams(ell, m_blocker + 1, variant, tree_depth))
    r = block.root
    return CounterexampleInstance(
        graph=block.graph,
        S_prime=tuple(sorted((*block.S, r))),
        T_prime=tuple(sorted((*block.T, r))),
        ell=ell,
        m_blocker=m_blocker,
        root=r,
        block=block,
    )


def block_size_formula(params: BlockParams) -> tuple[int, int]:
    """Closed-form (vertices, edges) of the standard block, without building it."""
    if params.variant != STANDARD:
        raise BlockParamsError("size formula covers the standard variant only")
    L, n = params.spine_length, params.anchor_count
    tree_vertices = n - 1  # 2^(depth-1) - 1 nodes in J, root included
    vertices, edges = L + 2, L  # path plus isolated root
    for m in range(2, params.m + 1):
        ports = n * (m - 1)
        vertices = tree_vertices + ports * (L - 1) + ports + (n - 1) * (vertices - 2 * (m - 1) - 1)
        edges = (tree_vertices - 1) + ports * L + (n - 1) * edges
    return vertices, edges


def spines(block: Block) -> dict[int, tuple[int, ...]]:
    """Top-level spine interiors keyed by spine id (ordered from the tree leaf)."""
    out: dict[int, list[tuple[int, int]]] = {}
    # copies keep their own spine ids, so only count vertices created before the copies
    limit = _first_copy_vertex(block)
    for v, r in enumerate(block.graph.roles[:limit]):
        if r.tag == "spine_internal":
            out.setdefault(r.params[0], []).append((r.params[1], v))
    return {sid: tuple(v for _, v in sorted(items)) for sid, items in sorted(out.items())}


def _first_copy_vertex(block: Block) -> int:
    p = block.params
    if p.m == 1:
        return block.graph.vertex_count
    n = p.anchor_count
    tree = n - 1
    ports = n * (p.m - 1)
    return tree + ports + ports * (p.spine_length - 1)


def shorten_spine(block: Block, spine_id: int) -> Block:
    """Mutant block: the given top-level spine is contracted to a single edge."""
    interior = spines(block).get(spine_id)
    if not interior:
        raise BlockParamsError(f"no spine with id {spine_id}")
    g = block.graph
    first, last = interior[0], interior[-1]
    (u,) = [w for w in g.adjacency[first] if w not in interior]
    (p,) = [w for w in g.adjacency[last] if w not in interior]
    drop = set(interior)
    keep = [v for v in range(g.vertex_count) if v not in drop]
    new_id = {v: i for i, v in enumerate(keep)}
    edges = [(new_id[a], new_id[c]) for a, c in g.edges() if a not in drop and c not in drop]
    edges.append((new_id[u], new_id[p]))
    mutant = Graph.from_edges(len(keep), edges, [g.roles[v] for v in keep])
    return Block(
        mutant,
        new_id[block.root],
        tuple(new_id[v] for v in block.S),
        tuple(new_id[v] for v in block.T),
        block.params,
    )


def iter_blocks(ell: int, max_m: int, variant: str = STANDARD) -> Iterator[Block]:
    """(ell, 1), (ell, 2), ... (ell, max_m), reusing each block for the next level."""
    block = _base_block(BlockParams(ell, 1, variant))
    yield block
    for m in range(2, max_m + 1):
        block = _recursive_block(BlockParams(ell, m, variant), block)
        yield block
