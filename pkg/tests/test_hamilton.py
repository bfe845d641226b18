import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complete, cycle, graphs, petersen
from hamcover.errors import ConnectionFailed, SearchFailed
from hamcover.graph import LinearForest, build_graph, canon, verify_hamilton_cycle
from hamcover.hamilton import (
    PairSet,
    check_extension_hypotheses,
    connect_pairs_disjoint,
    extend_directly,
    extend_forest_to_hamilton,
    find_hamilton_cycle,
    hamilton_path_between,
    make_extension_plan,
    pack_hamilton_cycles,
)
from hamcover.pipeline import enumerate_hamilton_cycles
from hamcover.random_model import SampleSpec, sample_gnp


def is_ham_path(g, path, x, y):
    return (
        sorted(path) == list(range(g.n))
        and {path[0], path[-1]} == {x, y}
        and all(g.has_edge(a, b) for a, b in zip(path, path[1:]))
    )


# --- single cycles and paths --------------------------------------------------

def test_c5_has_its_cycle():
    hc = find_hamilton_cycle(cycle(5))
    assert verify_hamilton_cycle(cycle(5), hc) and hc.edges == cycle(5).edge_set


def test_k5_cycle_is_valid():
    assert verify_hamilton_cycle(complete(5), find_hamilton_cycle(complete(5), seed=4))


def test_path_graph_fails():
    with pytest.raises(SearchFailed):
        find_hamilton_cycle(build_graph(4, [(0, 1), (1, 2), (2, 3)]))


def test_petersen_fails_within_budget():
    with pytest.raises(SearchFailed):
        find_hamilton_cycle(petersen(), budget=5000)


def test_forced_edges_are_used():
    g = complete(7)
    forced = [(0, 3), (3, 5), (1, 6)]
    hc = find_hamilton_cycle(g, seed=2, forced=forced)
    assert set(forced) <= hc.edges


def test_search_is_deterministic():
    g = sample_gnp(SampleSpec(60, 0.2, 5))
    assert find_hamilton_cycle(g, seed=9).order == find_hamilton_cycle(g, seed=9).order


@given(graphs(min_n=3, max_n=8), st.integers(0, 100))
def test_cycle_search_agrees_with_enumeration(g, seed):
    exists = bool(enumerate_hamilton_cycles(g))
    try:
        hc = find_hamilton_cycle(g, seed=seed)
    except SearchFailed:
        # small graphs: the default budget is ample, so failure means none exists
        assert not exists
    else:
        assert exists and verify_hamilton_cycle(g, hc)


def test_path_examples():
    p = hamilton_path_between(complete(4), 0, 3)
    assert is_ham_path(complete(4), p, 0, 3)
    assert hamilton_path_between(cycle(4), 0, 1) == [0, 3, 2, 1]
    with pytest.raises(SearchFailed):
        hamilton_path_between(build_graph(4, [(0, 1), (2, 3)]), 0, 3)


@given(graphs(min_n=2, max_n=7), st.integers(0, 6), st.integers(0, 6))
def test_path_search_agrees_with_networkx(g, x, y):
    x, y = x % g.n, y % g.n
    if x == y:
        return
    perms = nx.algorithms.simple_paths.all_simple_paths(nx.Graph(g.edge_list()), x, y) if g.m else []
    exists = False
    try:
        exists = any(len(p) == g.n for p in perms)
    except nx.NodeNotFound:
        exists = g.n == 2 and g.has_edge(x, y)
    try:
        path = hamilton_path_between(g, x, y)
    except SearchFailed:
        assert not exists
    else:
        assert exists and is_ham_path(g, path, x, y)


# --- packing ------------------------------------------------------------------

def test_pack_k5_is_walecki():
    res = pack_hamilton_cycles(complete(5), 2)
    assert res.achieved == 2 and res.leftover.m == 0
    assert not (res.cycles[0].edges & res.cycles[1].edges)


def test_pack_c6():
    res = pack_hamilton_cycles(cycle(6), 1)
    assert res.achieved == 1 and res.leftover.m == 0


def test_pack_is_edge_disjoint_on_random_graph():
    g = sample_gnp(SampleSpec(120, 0.2, 3))
    res = pack_hamilton_cycles(g, seed=1)
    seen = set()
    for c in res.cycles:
        assert verify_hamilton_cycle(g, c)
        assert not (c.edges & seen)
        seen |= c.edges
    assert seen | res.leftover.edge_set == g.edge_set
    assert res.shortfall == 0


# --- pair connection ----------------------------------------------------------

def test_connect_examples():
    assert connect_pairs_disjoint(complete(6), PairSet(())) == []
    paths = connect_pairs_disjoint(complete(6), PairSet(((0, 5),)))
    assert paths[0][0] == 0 and paths[0][-1] == 5


def test_connect_disconnected_fails():
    with pytest.raises(ConnectionFailed):
        connect_pairs_disjoint(build_graph(4, [(0, 1), (2, 3)]), PairSet(((0, 3),)), budget=3)


def test_pairs_must_be_distinct():
    with pytest.raises(ValueError):
        PairSet(((0, 1), (1, 2)))


def test_connect_ten_pairs_on_random_graph():
    g = sample_gnp(SampleSpec(300, 0.2, 1))
    rng = random.Random(0)
    vs = rng.sample(range(300), 20)
    ps = PairSet(tuple((vs[2 * i], vs[2 * i + 1]) for i in range(10)))
    paths = connect_pairs_disjoint(g, ps, seed=2)
    assert len(paths) == 10
    used = [v for p in paths for v in p]
    assert len(used) == len(set(used))
    for (a, b), path in zip(ps.pairs, paths):
        assert path[0] == a and path[-1] == b
        assert all(g.has_edge(u, v) for u, v in zip(path, path[1:]))


# --- extension ----------------------------------------------------------------

def extend(g, f, seed=0):
    plan = make_extension_plan(g, f, seed)
    return extend_forest_to_hamilton(g, f, plan, strict=False)


def test_extend_empty_forest():
    g = complete(6)
    res = extend(g, LinearForest())
    assert verify_hamilton_cycle(g, res.cycle)


def test_extend_single_edge_k5():
    g = complete(5)
    res = extend(g, LinearForest(((1, 3),)))
    assert verify_hamilton_cycle(g, res.cycle) and (1, 3) in res.cycle.edges


def test_extend_matching_on_random_graph():
    g = sample_gnp(SampleSpec(400, 0.2, 7))
    rng = random.Random(1)
    vs = rng.sample(range(400), 200)
    pairs = [canon(vs[2 * i], vs[2 * i + 1]) for i in range(100)]
    # non-edges of g are allowed: the cycle lives in g plus the forest
    f = LinearForest(tuple(pairs))
    res = extend(g.with_edges(pairs), f, seed=3)
    assert verify_hamilton_cycle(g.with_edges(pairs), res.cycle)
    assert set(pairs) <= res.cycle.edges


def test_extend_long_paths():
    g = sample_gnp(SampleSpec(300, 0.15, 2))
    hc = find_hamilton_cycle(g, seed=1).order
    # chop a Hamilton cycle into paths of length 5 with gaps
    paths = [tuple(hc[i:i + 5]) for i in range(0, 250, 8)]
    f = LinearForest(tuple(paths))
    res = extend(g, f, seed=5)
    assert verify_hamilton_cycle(g, res.cycle) and f.edges <= res.cycle.edges
    assert res.route == "phases"
    ph = res.phases
    assert ph["initial_components"] == len(paths)
    assert ph["after_phase_1"] <= max(ph["initial_components"], 300 // 20)
    assert ph["after_phase_2"] <= ph["after_phase_1"]


def test_extend_directly_keeps_forest():
    g = sample_gnp(SampleSpec(80, 0.3, 4))
    order = find_hamilton_cycle(g, seed=2).order
    f = LinearForest((tuple(order[:12]), tuple(order[20:30])))
    hc = extend_directly(g, f, seed=1)
    assert verify_hamilton_cycle(g, hc) and f.edges <= hc.edges


def test_hypotheses_report():
    g = complete(10)
    f = LinearForest(((0, 1, 2),))
    h = check_extension_hypotheses(g, f, 9.0, 0.5, 0.5)
    assert h["outside"] == 7 and h["min_outside_degree"] == 6 and h["holds"]
    assert not check_extension_hypotheses(g, f, 9.0, 0.8, 0.5)["holds"]


def test_extension_is_deterministic():
    g = sample_gnp(SampleSpec(150, 0.2, 9))
    f = LinearForest(((0, 5), (7, 9, 11)))
    g2 = g.with_edges(f.edges)
    assert extend(g2, f, 4).cycle == extend(g2, f, 4).cycle
