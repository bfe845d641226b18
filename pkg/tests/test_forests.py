import itertools
import math
import random

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from conftest import bipartite_graphs, complete, cycle, graphs
from hamcover.errors import NotBipartite, PreconditionViolated, TooLarge
from hamcover.forests import (
    Bipartition,
    ForestCollection,
    approx_linear_arboricity,
    brute_force_linear_arboricity,
    cherry_matching,
    decompose_with_core,
    konig_edge_coloring,
    merge_edges_into_forests,
)
from hamcover.graph import Graph, LinearForest, build_graph, is_linear_forest


def is_matching(edges):
    vs = [x for e in edges for x in e]
    return len(vs) == len(set(vs))


# --- Konig --------------------------------------------------------------------

def test_konig_k33():
    g = build_graph(6, [(a, b) for a in range(3) for b in range(3, 6)])
    ms = konig_edge_coloring(g, Bipartition.of(range(3), range(3, 6)))
    assert len(ms) == 3 and all(len(m) == 3 and is_matching(m) for m in ms)
    assert sorted(e for m in ms for e in m) == g.edge_list()


def test_konig_small_cases():
    assert konig_edge_coloring(build_graph(2, [(0, 1)]), Bipartition.of([0], [1])) == [[(0, 1)]]
    star = build_graph(5, [(0, i) for i in range(1, 5)])
    assert konig_edge_coloring(star, Bipartition.of([0], range(1, 5))) == [[(0, i)] for i in range(1, 5)]


def test_konig_rejects_odd_cycle():
    with pytest.raises(NotBipartite) as info:
        konig_edge_coloring(cycle(5), Bipartition.of([0, 2, 4], [1, 3]))
    w = info.value.witness
    assert len(w) % 2 == 1 and len(w) == 5


@given(bipartite_graphs(max_side=15))
def test_konig_partitions_into_delta_matchings(case):
    g, a, b = case
    ms = konig_edge_coloring(g, Bipartition.of(a, b))
    assert len(ms) == g.max_degree
    assert all(is_matching(m) for m in ms)
    assert sorted(e for m in ms for e in m) == g.edge_list()


# --- cherries -----------------------------------------------------------------

def test_cherry_examples():
    cm = cherry_matching(build_graph(3, [(0, 2), (1, 2)]), Bipartition.of([0, 1], [2]))
    assert [(c.center, c.leaves) for c in cm.cherries] == [(2, (0, 1))]
    k42 = build_graph(6, [(a, b) for a in range(4) for b in (4, 5)])
    cm = cherry_matching(k42, Bipartition.of(range(4), [4, 5]))
    assert cm.centers == {4, 5}
    with pytest.raises(PreconditionViolated) as info:
        cherry_matching(build_graph(2, [(0, 1)]), Bipartition.of([0], [1]))
    assert info.value.witness == (0, 1)


def hall_holds(g, a, b):
    deg = g.degrees
    return all(deg[y] >= max(2, 2 * deg[x]) for x in a for y in b)


@st.composite
def star_heavy_bipartite(draw):
    nb = draw(st.integers(1, 5))
    na = draw(st.integers(2, 16))
    edges = set()
    for x in range(nb, nb + na):
        for y in draw(st.sets(st.integers(0, nb - 1), min_size=1, max_size=2)):
            edges.add((y, x))
    g = build_graph(nb + na, edges)
    return g, list(range(nb, nb + na)), list(range(nb))


@settings(suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow], max_examples=200)
@given(star_heavy_bipartite())
def test_cherries_cover_b_when_hall_holds(case):
    g, a, b = case
    assume(hall_holds(g, a, b))
    cm = cherry_matching(g, Bipartition.of(a, b))
    assert cm.centers == set(b)
    assert all(e in g.edge_set for e in cm.edges)


# --- core decomposition -------------------------------------------------------

def test_core_star_of_hundred():
    g = build_graph(101, [(0, i) for i in range(1, 101)])
    fc = decompose_with_core(g, Bipartition.of(range(1, 101), [0]), 0.01)
    assert len(fc) == 50 and fc.is_partition_of(g)
    for f in fc.forests:
        assert len(f.paths) == 1 and len(f.paths[0]) == 3 and f.paths[0][1] == 0


def test_core_empty_graph():
    assert len(decompose_with_core(build_graph(3, []), Bipartition.of([0, 1], [2]))) == 0


def test_core_two_centres():
    g = build_graph(22, [(0, i) for i in range(2, 12)] + [(1, i) for i in range(12, 22)])
    fc = decompose_with_core(g, Bipartition.of(range(2, 22), [0, 1]), 0.1)
    assert len(fc) == 5 and fc.is_partition_of(g)
    for f in fc.forests:
        assert sorted(p[1] for p in f.paths if len(p) == 3) == [0, 1]


def test_core_precondition_names_vertex():
    g = build_graph(4, [(0, 1), (0, 2), (1, 3)])
    with pytest.raises(PreconditionViolated) as info:
        decompose_with_core(g, Bipartition.of([0, 3], [1, 2]), 0.01)
    assert info.value.witness == 0


@st.composite
def core_instances(draw):
    """A independent, edges A-B and inside B."""
    nb = draw(st.integers(1, 4))
    na = draw(st.integers(1, 10))
    b = list(range(nb))
    a = list(range(nb, nb + na))
    pairs = [(x, y) for x in b for y in a] + list(itertools.combinations(b, 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, keep in zip(pairs, mask) if keep][:20]
    return build_graph(nb + na, edges), a, b


def core_ratio_for(g, b):
    into = max((len(g.adj[v] & set(b)) for v in range(g.n)), default=0)
    return into / max(g.max_degree, 1)


@given(core_instances())
def test_core_matches_oracle(case):
    g, a, b = case
    opt, _ = brute_force_linear_arboricity(g)
    target = math.ceil(g.max_degree / 2)
    assume(opt == target)
    fc = decompose_with_core(g, Bipartition.of(a, b), core_ratio_for(g, b))
    assert len(fc) == target and fc.is_partition_of(g) and fc.all_linear(g.n)


# --- merging ------------------------------------------------------------------

def empty_collection(q):
    return ForestCollection([LinearForest() for _ in range(q)], "F_1")


def test_merge_single_edge():
    out = merge_edges_into_forests(empty_collection(5), build_graph(4, [(1, 2)]), 1)
    assert len(out) == 5 and out.edge_multiset() == [(1, 2)]


def test_merge_matching():
    h = build_graph(10, [(2 * i, 2 * i + 1) for i in range(5)])
    out = merge_edges_into_forests(empty_collection(5), h, 1)
    assert len(out) == 5 and out.edge_multiset() == h.edge_list() and out.all_linear(10)


def test_merge_rejects_small_collection():
    with pytest.raises(PreconditionViolated):
        merge_edges_into_forests(empty_collection(4), build_graph(2, [(0, 1)]), 1)


def random_sparse_forests(n, q, d, rng):
    deg = [0] * n
    forests = []
    taken = set()
    for _ in range(q):
        es = set()
        for _ in range(n // 3):
            u, v = rng.sample(range(n), 2)
            e = (min(u, v), max(u, v))
            if deg[u] < d and deg[v] < d and e not in taken and is_linear_forest(es | {e}, n):
                es.add(e)
                taken.add(e)
                deg[u] += 1
                deg[v] += 1
        forests.append(LinearForest.from_edges(es))
    return forests, deg


@pytest.mark.parametrize("seed", range(20))
def test_merge_random(seed):
    rng = random.Random(seed)
    n, d = 40, 3
    forests, deg = random_sparse_forests(n, 13, d, rng)
    used = {e for f in forests for e in f.edges}
    h_edges = set()
    hdeg = [0] * n
    for _ in range(200):
        u, v = rng.sample(range(n), 2)
        e = (min(u, v), max(u, v))
        if e not in used and e not in h_edges and hdeg[u] < d and hdeg[v] < d:
            h_edges.add(e)
            hdeg[u] += 1
            hdeg[v] += 1
    h = Graph.from_edges(n, h_edges)
    out = merge_edges_into_forests(ForestCollection(forests, "F_1"), h, d)
    assert len(out) == 13 and out.all_linear(n)
    assert set(out.edge_multiset()) == used | h_edges
    assert len(out.edge_multiset()) == len(used) + h.m


# --- linear arboricity --------------------------------------------------------

def test_approx_examples():
    assert len(approx_linear_arboricity(cycle(6), 0.5)) <= 2
    fc = approx_linear_arboricity(complete(4), 0.4)
    assert len(fc) == 2 and fc.is_partition_of(complete(4))
    assert len(approx_linear_arboricity(build_graph(5, []), 0.1)) == 0


@pytest.mark.parametrize("g, want", [(cycle(3), 2), (complete(4), 2), (build_graph(5, [(i, i + 1) for i in range(4)]), 1),
                                     (complete(5), 3)])
def test_brute_force_arboricity(g, want):
    count, fc = brute_force_linear_arboricity(g)
    assert count == want and fc.is_partition_of(g) and fc.all_linear(g.n)


def test_brute_force_size_guard():
    with pytest.raises(TooLarge):
        brute_force_linear_arboricity(complete(8))


@given(graphs(max_n=9).filter(lambda g: g.m <= 14), st.sampled_from([0.1, 0.5]))
def test_approx_is_a_partition_within_one_of_oracle(g, eps):
    fc = approx_linear_arboricity(g, eps)
    assert fc.is_partition_of(g) and fc.all_linear(g.n)
    opt, _ = brute_force_linear_arboricity(g)
    assert opt <= len(fc) <= opt + 1
    if not fc.meta["fallback"]:
        assert len(fc) <= max(math.ceil((1 + eps) * g.max_degree / 2), 1 if g.m else 0)
