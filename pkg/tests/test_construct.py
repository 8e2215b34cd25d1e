import pytest

from blockforge.construct import (
    DEGREE3,
    BlockParams,
    BlockParamsError,
    anchor_attachment,
    assemble_counterexample,
    block_size_formula,
    build_block,
    build_block_degree3,
    build_l2_explicit,
    iter_blocks,
    shorten_spine,
    spines,
)
from blockforge.graph import bfs_distances, degree_stats
from blockforge.io import serialize


@pytest.mark.parametrize("m, vertices, edges", [(1, 5, 3), (2, 45, 51), (3, 335, 411), (4, 2375, 2955)])
def test_sizes_ell1(m, vertices, edges):
    b = build_block(BlockParams(1, m))
    assert (b.graph.vertex_count, b.graph.edge_count) == (vertices, edges)
    assert block_size_formula(BlockParams(1, m)) == (vertices, edges)


@pytest.mark.parametrize("ell, m", [(2, 1), (2, 2), (2, 3), (1, 2), (3, 2)])
def test_formula_matches_builder(ell, m):
    p = BlockParams(ell, m)
    b = build_block(p)
    assert block_size_formula(p) == (b.graph.vertex_count, b.graph.edge_count)


def test_formula_with_deeper_tree():
    p = BlockParams(1, 3, tree_depth=5)
    b = build_block(p)
    assert block_size_formula(p) == (b.graph.vertex_count, b.graph.edge_count)


def test_base_block_shape():
    b = build_block(BlockParams(1, 1))
    g = b.graph
    assert g.degree(b.root) == 0
    assert bfs_distances(g, b.S)[b.T[0]] == 3
    assert len(b.S) == len(b.T) == 1


def test_one_root_and_terminal_counts():
    for b in iter_blocks(1, 3):
        assert b.graph.vertices_with_tag("root") == (b.root,)
        assert len(b.S) == len(b.T) == b.params.m
        assert not set(b.S) & set(b.T)


def test_explicit_l2_equals_recursive():
    for ell in (1, 2):
        assert serialize(build_l2_explicit(ell)) == serialize(build_block(BlockParams(ell, 2)))


def test_anchor_attachment_reference_triples():
    assert anchor_attachment(1, 32) == (1, 3)
    assert anchor_attachment(2, 32) == (2, 5)
    assert anchor_attachment(16, 32) == (30, 32)
    hit = sorted(p for k in range(1, 17) for p in anchor_attachment(k, 32))
    assert hit == list(range(1, 33))


@pytest.mark.parametrize("k, n", [(0, 8), (5, 8), (1, 6), (1, 2)])
def test_anchor_attachment_rejects(k, n):
    with pytest.raises(BlockParamsError):
        anchor_attachment(k, n)


@pytest.mark.parametrize(
    "kwargs",
    [dict(ell=0, m=1), dict(ell=1, m=0), dict(ell=1, m=1, variant="odd"), dict(ell=1, m=2, tree_depth=3)],
)
def test_params_validation(kwargs):
    with pytest.raises(BlockParamsError):
        BlockParams(**kwargs)


def test_default_tree_depth():
    assert BlockParams(2, 2).tree_depth == 6
    assert BlockParams(1, 2).anchor_count == 8


def test_root_degree_and_spines():
    b = build_block(BlockParams(1, 2))
    assert b.graph.degree(b.root) == 2
    sp = spines(b)
    assert sorted(sp) == list(range(1, 9))
    assert all(len(v) == 2 for v in sp.values())
    assert build_block(BlockParams(1, 3)).graph.degree(0) == 16


def test_degree3_variant_degrees():
    for m, size in ((1, 7), (2, 65), (3, 475)):
        b = build_block_degree3(BlockParams(1, m))
        g = b.graph
        assert g.vertex_count == size
        assert b.params.variant == DEGREE3
        assert max((g.degree(v) for v in range(g.vertex_count) if v != b.root), default=0) <= 3
        # terminals are pendant leaves
        assert all(g.degree(v) == 1 for v in (*b.S, *b.T))


def test_degree3_histogram_13():
    ds = degree_stats(build_block_degree3(BlockParams(1, 3)).graph)
    assert ds.histogram == {1: 6, 2: 324, 3: 144, 16: 1}


def test_degree3_fans_too_wide():
    with pytest.raises(BlockParamsError):
        build_block_degree3(BlockParams(1, 6))


def test_shorten_spine_mutant():
    b = build_block(BlockParams(1, 2))
    mut = shorten_spine(b, 1)
    assert mut.graph.vertex_count == b.graph.vertex_count - 2
    assert mut.graph.edge_count == b.graph.edge_count - 2
    with pytest.raises(BlockParamsError):
        shorten_spine(b, 99)


def test_counterexample_assembly():
    ce = assemble_counterexample(1, 1)
    assert ce.root in ce.S_prime and ce.root in ce.T_prime
    assert len(ce.S_prime) == 3 and ce.block.params.m == 2
    with pytest.raises(BlockParamsError):
        assemble_counterexample(1, 0)


def test_build_is_deterministic():
    p = BlockParams(1, 3)
    assert serialize(build_block(p)) == serialize(build_block(p))
