import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from addrep.errors import BudgetExceeded, InconsistentInput, MalformedWalk, SpecError
from addrep.extract import PartitionSets, RepPairTable
from addrep.smallgraphs import all_multigraphs, random_multigraph
from addrep.walkgraph import (
    MultiGraph,
    Walk,
    brute_force_even_walk,
    build_gk,
    detect_even_closed_walk,
    is_nontrivial_even_closed_walk,
    lemma3_check,
    read_graph_file,
    write_graph_text,
)


@st.composite
def multigraphs(draw, max_v=6, max_e=8):
    n = draw(st.integers(1, max_v))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=max_e))
    return MultiGraph(range(n), edges)


def square():
    return MultiGraph(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])


def test_multigraph_rejects_undeclared_endpoint():
    with pytest.raises(InconsistentInput):
        MultiGraph([0, 1], [(0, 2)])


def test_walk_predicate_square():
    assert is_nontrivial_even_closed_walk(square(), Walk((0, 1, 2, 3), (0, 1, 2, 3)))


def test_walk_predicate_triangle_twice(triangle):
    # every edge used twice: no edge appears exactly once
    w = Walk((0, 1, 2, 0, 1, 2), (0, 1, 2, 0, 1, 2))
    assert not is_nontrivial_even_closed_walk(triangle, w)


def test_walk_predicate_bowtie(bowtie):
    w = Walk((0, 1, 2, 0, 3, 4), (0, 1, 2, 3, 4, 5))
    assert is_nontrivial_even_closed_walk(bowtie, w)


def test_walk_predicate_odd_and_overused(triangle):
    assert not is_nontrivial_even_closed_walk(triangle, Walk((0, 1, 2), (0, 1, 2)))
    G = MultiGraph([0, 1], [(0, 1)])
    # back and forth on one edge: used twice, never once
    assert not is_nontrivial_even_closed_walk(G, Walk((0, 1), (0, 0)))


def test_walk_predicate_malformed(triangle):
    with pytest.raises(MalformedWalk):
        is_nontrivial_even_closed_walk(triangle, Walk((0, 2), (0, 0)))
    with pytest.raises(MalformedWalk):
        is_nontrivial_even_closed_walk(triangle, Walk((), ()))
    with pytest.raises(MalformedWalk):
        is_nontrivial_even_closed_walk(triangle, Walk((0,), (7,)))


def test_detect_triangle(triangle):
    v = detect_even_closed_walk(triangle)
    assert not v.found
    (c,) = v.components
    assert (c.cycle_rank, c.unique_cycle_parity, c.excess) == (1, "odd", 0)


def test_detect_bowtie(bowtie):
    v = detect_even_closed_walk(bowtie)
    assert v.found and len(v.walk) == 6
    assert is_nontrivial_even_closed_walk(bowtie, v.walk)


def test_detect_square_returns_cycle():
    v = detect_even_closed_walk(square())
    assert v.found and len(v.walk) == 4


def test_detect_two_loops():
    G = MultiGraph([0], [(0, 0), (0, 0)])
    v = detect_even_closed_walk(G)
    assert v.found and len(v.walk) == 2
    assert brute_force_even_walk(G) is not None


def test_detect_parallel_pair_is_even_cycle():
    G = MultiGraph([0, 1], [(0, 1), (0, 1)])
    v = detect_even_closed_walk(G)
    assert v.found and v.walk.edges in ((0, 1), (1, 0))


def test_detect_disjoint_triangles_joined_by_path():
    G = MultiGraph(range(7), [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 4)])
    v = detect_even_closed_walk(G)
    assert v.found
    # 3 + 3 + 2 * path length 2
    assert len(v.walk) == 10
    assert is_nontrivial_even_closed_walk(G, v.walk)


def test_detect_triangle_and_loop_in_separate_components():
    G = MultiGraph(range(4), [(0, 1), (1, 2), (2, 0), (3, 3)])
    v = detect_even_closed_walk(G)
    assert not v.found
    assert sorted(c.vertex_count for c in v.components) == [1, 3]


def test_detect_single_loop(single_loop):
    assert not detect_even_closed_walk(single_loop).found


def test_brute_force_examples(triangle, single_loop):
    assert len(brute_force_even_walk(square(), 8)) == 4
    assert brute_force_even_walk(triangle, 6) is None
    assert brute_force_even_walk(single_loop, 2) is None


def test_brute_force_budget():
    path = MultiGraph(range(4), [(0, 1), (1, 2), (2, 3)])
    with pytest.raises(BudgetExceeded):
        brute_force_even_walk(path, node_cap=3)
    assert brute_force_even_walk(path) is None


@given(multigraphs())
@settings(max_examples=300, deadline=None)
def test_detector_matches_oracle(G):
    v = detect_even_closed_walk(G)
    w = brute_force_even_walk(G)
    assert v.found == (w is not None)
    if w is not None:
        assert is_nontrivial_even_closed_walk(G, w)


@given(multigraphs(max_v=12, max_e=18))
@settings(max_examples=300, deadline=None)
def test_certificate_shape_and_lemma3(G):
    v = detect_even_closed_walk(G)
    if v.found:
        assert is_nontrivial_even_closed_walk(G, v.walk)
    else:
        assert all(c.cycle_rank <= 1 for c in v.components)
        assert all(c.unique_cycle_parity in ("odd", "none") for c in v.components)
        assert len(G.edges) <= len(G.vertices)
    for c in v.components:
        assert (c.unique_cycle_parity == "none") == (c.cycle_rank == 0)


def test_exhaustive_four_vertices():
    for G in all_multigraphs(4, 5):
        assert detect_even_closed_walk(G).found == (brute_force_even_walk(G) is not None)


def test_lemma3_triangle_and_tree(triangle):
    r = lemma3_check(triangle)
    assert r.holds and r.component_excess == [0]
    tree = MultiGraph(range(5), [(0, 1), (0, 2), (2, 3), (2, 4)])
    r = lemma3_check(tree)
    assert r.holds and r.component_excess == [-1]
    assert r.edge_count == r.vertex_count - 1


def test_lemma3_no_claim_when_walk_exists(bowtie):
    assert lemma3_check(bowtie).holds is None


def test_lemma3_random_batch():
    rng = random.Random(11)
    for _ in range(2000):
        G = random_multigraph(rng)
        r = lemma3_check(G)
        assert r.holds in (True, None)


class _Table:
    def __init__(self, pairs):
        self.pairs = pairs

    def pair(self, i, k):
        return self.pairs.get(i)


def _sets(k, M, S):
    return PartitionSets(k, frozenset(S), frozenset(), frozenset(M), frozenset())


def test_build_gk_empty():
    G = build_gk(_sets(1, [], []), _Table({}), 1)
    assert not G.vertices and not G.edges


def test_build_gk_two_disjoint_edges():
    G = build_gk(_sets(3, [1, 2], [5, 9, 6, 8]), _Table({1: (5, 9), 2: (6, 8)}), 3)
    assert len(G.vertices) == 4 and len(G.edges) == 2
    assert not detect_even_closed_walk(G).found
    assert brute_force_even_walk(G) is None


def test_build_gk_loop():
    G = build_gk(_sets(2, [1], [7]), _Table({1: (7, 7)}), 2)
    assert G.vertices == {7} and G.edges == ((7, 7),)


def test_build_gk_inconsistent():
    with pytest.raises(InconsistentInput):
        build_gk(_sets(3, [1, 2], [5, 9]), _Table({1: (5, 9), 2: (5, 9)}), 3)
    with pytest.raises(InconsistentInput):
        build_gk(_sets(2, [1], [5]), _Table({1: (5, 9)}), 2)


def test_build_gk_with_real_table():
    table = RepPairTable(3, {(1, 3): (5, 9), (2, 3): (6, 8), (1, 2): (0, 1)})
    G = build_gk(_sets(3, [1, 2], [5, 6, 8, 9]), table, 3)
    assert sorted(G.edges) == [(5, 9), (6, 8)]


@st.composite
def growth_instances(draw):
    """Edges {c_i, d_i} with c_i + d_i = a_i + a_k, d_i < a_k, and a_{i+1} > 3 a_i."""
    k = draw(st.integers(2, 6))
    a = [draw(st.integers(1, 4))]
    for _ in range(k - 1):
        a.append(3 * a[-1] + draw(st.integers(1, 3)))
    ak = a[-1]
    edges = []
    for ai in a[:-1]:
        s = ai + ak
        lo = s - ak + 1  # d < a_k  <=>  c > a_i
        hi = s // 2
        if lo <= hi and draw(st.booleans()):
            c = draw(st.integers(lo, hi))
            edges.append((c, s - c))
    verts = {v for e in edges for v in e}
    return MultiGraph(verts, edges)


@given(growth_instances())
@settings(max_examples=300, deadline=None)
def test_growth_forces_no_even_walk(G):
    assert not detect_even_closed_walk(G).found
    assert brute_force_even_walk(G) is None
    assert len(G.edges) <= len(G.vertices)


def test_graph_files(tmp_path, bowtie):
    p = tmp_path / "g.txt"
    write_graph_text(bowtie, p)
    assert read_graph_file(p) == bowtie
    j = tmp_path / "g.json"
    j.write_text(json.dumps({"vertices": [10, 20], "edges": [[10, 20], [20, 20]]}))
    G = read_graph_file(j)
    assert G.vertices == {10, 20} and len(G.edges) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("2 3\n0 1\n")
    with pytest.raises(SpecError):
        read_graph_file(bad)
