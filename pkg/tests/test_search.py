import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockforge.construct import BlockParams, assemble_counterexample, build_block
from blockforge.graph import Graph, GraphInputError, ball, distance_between_sets
from blockforge.search import (
    BUDGET_EXCEEDED,
    EXHAUSTED,
    WITNESS,
    FarPathQuery,
    FarPathWitness,
    find_far_paths,
    min_pairwise_distance,
    top_level_branches,
    validate_witness,
)
from blockforge.verify import random_instance


def two_parallel_paths():
    # 0-1-2-3 and 4-5-6-7, nothing between them
    return Graph.from_edges(8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)])


def test_parallel_paths_witness():
    g = two_parallel_paths()
    q = FarPathQuery((0, 4), (3, 7), 2, 3)
    cert = find_far_paths(g, q)
    assert cert.outcome == WITNESS
    assert cert.witness.certified_min_pairwise_distance == float("inf")
    assert validate_witness(g, q, cert.witness) == []


@pytest.mark.parametrize("c", [1, 2, 3, 5])
def test_single_path_has_no_pair(c):
    g = Graph.from_edges(5, [(i, i + 1) for i in range(4)])
    cert = find_far_paths(g, FarPathQuery((0,), (4,), 2, c))
    assert cert.outcome == EXHAUSTED


def test_block12_no_far_pair_avoiding_root():
    b = build_block(BlockParams(1, 2))
    cert = find_far_paths(b.graph, FarPathQuery(b.S, b.T, 2, 3, (b.root,)))
    assert cert.outcome == EXHAUSTED


def test_block12_far_pair_through_root():
    b = build_block(BlockParams(1, 2))
    q = FarPathQuery(b.S, b.T, 2, 3)
    cert = find_far_paths(b.graph, q)
    assert cert.outcome == WITNESS
    assert validate_witness(b.graph, q, cert.witness) == []
    assert any(b.root in p for p in cert.witness.paths)
    assert min_pairwise_distance(b.graph, cert.witness.paths) >= 3


def test_counterexample11_no_three_far_paths():
    ce = assemble_counterexample(1, 1)
    cert = find_far_paths(ce.graph, FarPathQuery(ce.S_prime, ce.T_prime, 3, 3))
    assert cert.outcome == EXHAUSTED
    q2 = FarPathQuery(ce.S_prime, ce.T_prime, 2, 3)
    cert2 = find_far_paths(ce.graph, q2)
    assert cert2.outcome == WITNESS and validate_witness(ce.graph, q2, cert2.witness) == []


def test_trivial_path_on_shared_terminal():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    cert = find_far_paths(g, FarPathQuery((0, 2), (0, 2), 2, 2))
    assert cert.outcome == WITNESS
    assert cert.witness.paths == ((0,), (2,))


def test_k1_is_connectivity():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert find_far_paths(g, FarPathQuery((0,), (1,), 1, 3)).found
    assert not find_far_paths(g, FarPathQuery((0,), (3,), 1, 3)).found
    assert not find_far_paths(g, FarPathQuery((0,), (1,), 1, 1, forbidden=(1,))).found


def test_budget_exceeded_is_reported():
    b = build_block(BlockParams(1, 2))
    cert = find_far_paths(b.graph, FarPathQuery(b.S, b.T, 2, 3, (b.root,), budget=3))
    assert cert.outcome == BUDGET_EXCEEDED
    assert cert.witness is None
    assert cert.stats.nodes == 4


def test_budget_parallel_equals_serial():
    b = build_block(BlockParams(1, 2))
    q = FarPathQuery(b.S, b.T, 2, 3, (b.root,), budget=10)
    s, p = find_far_paths(b.graph, q), find_far_paths(b.graph, q, workers=2)
    assert (s.outcome, s.stats.as_dict()) == (p.outcome, p.stats.as_dict())


def test_query_validation():
    with pytest.raises(GraphInputError):
        FarPathQuery((0,), (1,), 0, 3)
    with pytest.raises(GraphInputError):
        FarPathQuery((0,), (1,), 1, 0)
    with pytest.raises(GraphInputError):
        FarPathQuery((0,), (1,), 1, 1, budget=-1)
    with pytest.raises(GraphInputError):
        find_far_paths(Graph.from_edges(2, [(0, 1)]), FarPathQuery((0,), (5,), 1, 1))


def test_validate_witness_catches_bad_tuples():
    g = two_parallel_paths()
    q = FarPathQuery((0, 4), (3, 7), 2, 3)
    assert validate_witness(g, q, FarPathWitness(((0, 1, 2, 3), (0, 1, 2, 3)), 0))
    assert validate_witness(g, q, FarPathWitness(((0, 2),), 0))
    assert validate_witness(g, q, FarPathWitness(((1, 2, 3), (4, 5, 6, 7)), 0))


def test_top_level_branches_order():
    b = build_block(BlockParams(1, 2))
    q = FarPathQuery(b.S, b.T, 2, 3, (b.root,))
    branches = top_level_branches(b.graph, q)
    assert branches == sorted(branches)
    assert all(p[0] in b.S for p in branches)


def random_path_pair(rng, g):
    """Two random walks turned into simple paths."""
    out = []
    for _ in range(2):
        v = rng.randrange(g.vertex_count)
        path = [v]
        for _ in range(rng.randint(0, 5)):
            nxt = [w for w in g.adjacency[path[-1]] if w not in path]
            if not nxt:
                break
            path.append(rng.choice(nxt))
        out.append(path)
    return out


def test_neighbourhood_reformulation_c3():
    rng = random.Random(4)
    for i in range(300):
        g = random_instance(11, i).graph
        P, Q = random_path_pair(rng, g)
        far = distance_between_sets(g, P, Q) >= 3
        assert far == (not set(ball(g, P, 1)) & set(ball(g, Q, 1)))


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_monotone_in_k_and_c(index):
    inst = random_instance(5, index, max_vertices=10)
    for k in (1, 2, 3):
        for c in (1, 2, 3):
            if find_far_paths(inst.graph, FarPathQuery(inst.S, inst.T, k, c, budget=None)).found:
                for k2 in range(1, k + 1):
                    for c2 in range(1, c + 1):
                        assert find_far_paths(inst.graph, FarPathQuery(inst.S, inst.T, k2, c2, budget=None)).found


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_witnesses_always_validate(index, k, c):
    inst = random_instance(6, index)
    q = FarPathQuery(inst.S, inst.T, k, c, budget=None)
    cert = find_far_paths(inst.graph, q)
    if cert.found:
        assert validate_witness(inst.graph, q, cert.witness) == []


def test_worker_count_does_not_change_result():
    ce = assemble_counterexample(1, 1)
    for k in (2, 3):
        q = FarPathQuery(ce.S_prime, ce.T_prime, k, 3)
        a, b = find_far_paths(ce.graph, q), find_far_paths(ce.graph, q, workers=4)
        assert a.outcome == b.outcome
        assert a.stats.as_dict() == b.stats.as_dict()
        assert (a.witness and a.witness.paths) == (b.witness and b.witness.paths)
