import json
import math
import random
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import TOYS, complete, cycle, graphs
from hamcover.errors import BudgetExceeded, PhaseFailure, PreconditionViolated, TooLarge
from hamcover.forests import ForestCollection
from hamcover.graph import Graph, LinearForest, build_graph, verify_cover
from hamcover.pipeline import (
    PROFILES,
    LeftoverPlan,
    PipelineConfig,
    brute_force_min_cover,
    build_F0,
    build_F1,
    compute_leftover,
    cover,
    enumerate_hamilton_cycles,
    f0_size,
    load_profile,
    merge_F0_F1,
    split_leftover,
)
from hamcover.random_model import SampleSpec, sample_gnp


def plan_for(L: Graph, alpha: float) -> LeftoverPlan:
    dl = L.max_degree
    B = frozenset(int(v) for v in np.flatnonzero(L.degrees >= (1 - alpha) * dl)) if dl else frozenset()
    return LeftoverPlan(L, B, math.ceil(dl / 2))


def hub_leftover(n=1200, hubs=3, deg=400, p=0.005, seed=0) -> Graph:
    """A few hubs of degree ``deg`` over a sparse random graph on the rest."""
    rng = random.Random(seed)
    edges = {(b, a) for b in range(hubs) for a in rng.sample(range(hubs, n), deg)}
    rest = sample_gnp(SampleSpec(n - hubs, p, seed))
    edges |= {(u + hubs, v + hubs) for u, v in rest.edge_list()}
    return Graph.from_edges(n, edges)


# --- config -------------------------------------------------------------------

def test_config_roundtrip_and_validation():
    cfg = PipelineConfig(seed=5, t=7)
    assert PipelineConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg
    with pytest.raises(ValueError):
        PipelineConfig.from_json({"bogus": 1})
    with pytest.raises(ValueError):
        PipelineConfig(t=2)
    with pytest.raises(ValueError):
        PipelineConfig(route="fast")


def test_profiles(tmp_path, monkeypatch):
    assert load_profile("desk") == PROFILES["desk"]
    assert load_profile("asymptotic", seed=3).t == 10_000
    with pytest.raises(KeyError):
        load_profile("nope")
    (tmp_path / "mine.json").write_text(json.dumps({"t": 4, "alpha": 0.1}))
    monkeypatch.setenv("HAMCOVER_PROFILE_DIR", str(tmp_path))
    cfg = load_profile("mine", seed=2)
    assert (cfg.profile, cfg.t, cfg.alpha, cfg.seed) == ("mine", 4, 0.1, 2)


def test_f0_size_rounds_up():
    assert f0_size(4, 0.5) == 3
    assert f0_size(100, 0.05) == 98
    assert f0_size(26, 0.05) == 26


# --- leftover and split -------------------------------------------------------

@pytest.mark.parametrize("name", ["C6", "K5"])
def test_leftover_empty_after_packing(name):
    packing, plan = compute_leftover(TOYS[name], None, PipelineConfig())
    assert plan.L.m == 0 and plan.B == frozenset() and plan.k == 0
    assert packing.achieved == TOYS[name].min_degree // 2


def test_leftover_on_random_graph():
    g = sample_gnp(SampleSpec(200, 0.2, 1))
    packing, plan = compute_leftover(g, 0.2, PipelineConfig())
    used = set().union(*(c.edges for c in packing.cycles))
    assert plan.L.edge_set == g.edge_set - used
    assert plan.k == math.ceil(plan.L.max_degree / 2)
    assert all(plan.L.degrees[b] >= 0.95 * plan.L.max_degree for b in plan.B)
    assert set(plan.diagnostics) == {"degree_window", "high_degree_size", "bad_neighbourhood"}


def test_split_empty_leftover():
    g = complete(9)
    plan = LeftoverPlan(Graph.from_edges(9, []), frozenset(), 0)
    pp = split_leftover(plan, g, PipelineConfig(t=3))
    assert len(pp.pieces) == 3 and all(p.m == 0 for p in pp.pieces)
    assert sorted(v for r in pp.reservoirs for v in r) == list(range(9))


@pytest.mark.parametrize("seed", range(10))
def test_split_single_edge(seed):
    g = complete(12)
    plan = LeftoverPlan(build_graph(12, [(2, 7)]), frozenset(), 1)
    pp = split_leftover(plan, g, PipelineConfig(t=3, seed=seed))
    holders = [i for i, p in enumerate(pp.pieces) if p.m]
    assert len(holders) == 1
    i = holders[0]
    assert 2 not in pp.reservoirs[i] and 7 not in pp.reservoirs[i]


def test_split_keeps_b_out_of_pieces():
    L = hub_leftover(n=300, deg=100, p=0.02)
    plan = plan_for(L, 0.5)
    pp = split_leftover(plan, L, PipelineConfig(t=4))
    piece_edges = [e for p in pp.pieces for e in p.edge_list()]
    assert sorted(piece_edges) == sorted(e for e in L.edge_list() if not set(e) & plan.B)
    for i, p in enumerate(pp.pieces):
        assert not {x for e in p.edge_list() for x in e} & pp.reservoirs[i]


# --- forests ------------------------------------------------------------------

def test_f0_pads_empty_pieces():
    L = Graph.from_edges(6, [])
    plan = LeftoverPlan(L, frozenset(), 4)
    pp = split_leftover(plan, complete(6), PipelineConfig(t=3))
    f0 = build_F0(pp, plan, PipelineConfig(t=3, alpha=0.5))
    assert len(f0) == 3 and all(len(f.vertices) == 1 and not f.edges for f in f0.forests)


def test_f0_of_one_cycle_piece():
    c6 = cycle(6)
    plan = LeftoverPlan(Graph.from_edges(8, c6.edge_list()), frozenset(), 10)
    pp = split_leftover(LeftoverPlan(Graph.from_edges(8, []), frozenset(), 0), complete(8), PipelineConfig(t=3))
    pp.pieces[0] = Graph.from_edges(8, c6.edge_list())
    f0 = build_F0(pp, plan, PipelineConfig(t=3))
    with_edges = [f for f in f0.forests if f.edges]
    assert len(with_edges) == 2 and len(f0) == f0_size(10, 0.05)
    assert sorted(e for f in with_edges for e in f.edges) == c6.edge_list()


def test_f0_budget_error():
    L = sample_gnp(SampleSpec(200, 0.1, 2))
    plan = plan_for(L, 0.05)
    pp = split_leftover(plan, L, PipelineConfig())
    with pytest.raises(BudgetExceeded) as info:
        build_F0(pp, plan, PipelineConfig())
    assert info.value.needed > info.value.allowed == f0_size(plan.k, 0.05)


def test_f1_without_b():
    plan = LeftoverPlan(Graph.from_edges(5, []), frozenset(), 3)
    f1 = build_F1(plan, PipelineConfig())
    assert len(f1) == 3 and not f1.edge_multiset()


def test_f1_star():
    L = build_graph(7, [(0, i) for i in range(1, 7)])
    plan = plan_for(L, 0.05)
    assert plan.B == {0} and plan.k == 3
    f1 = build_F1(plan, PipelineConfig())
    assert len(f1) == 3 and f1.is_partition_of(L) and f1.all_linear(7)


def test_merge_without_f0_returns_f1():
    L = build_graph(7, [(0, i) for i in range(1, 7)])
    plan = plan_for(L, 0.05)
    f1 = build_F1(plan, PipelineConfig())
    pp = split_leftover(plan, L, PipelineConfig(t=3))
    out = merge_F0_F1(ForestCollection([], "F_0"), f1, plan, pp, PipelineConfig(t=3))
    assert [f.edges for f in out.forests] == [f.edges for f in f1.forests]


def test_merge_disjoint_forests_are_unions():
    L = build_graph(8, [(0, 1), (2, 3), (4, 5), (6, 7)])
    plan = LeftoverPlan(L, frozenset(), 1)
    pp = split_leftover(plan, L, PipelineConfig(t=3))
    f0 = ForestCollection([LinearForest(((0, 1),)), LinearForest(((2, 3),))], "F_0")
    f1 = ForestCollection([LinearForest(((4, 5),)), LinearForest(((6, 7),))], "F_1")
    out = merge_F0_F1(f0, f1, plan, pp, PipelineConfig(t=3))
    assert [sorted(f.edges) for f in out.forests] == [[(0, 1), (4, 5)], [(2, 3), (6, 7)]]
    assert out.meta["delta_L_prime"] == 0


def test_staged_route_bookkeeping():
    L = hub_leftover()
    cfg = PipelineConfig(t=3, alpha=0.5, seed=1)
    plan = plan_for(L, cfg.alpha)
    assert plan.B == {0, 1, 2}
    pp = split_leftover(plan, L, cfg)
    f0 = build_F0(pp, plan, cfg)
    l_minus_b = {e for e in L.edge_list() if not set(e) & plan.B}
    assert set(f0.edge_multiset()) == l_minus_b and len(f0.edge_multiset()) == len(l_minus_b)
    assert len(f0) == f0_size(plan.k, cfg.alpha)
    f1 = build_F1(plan, cfg)
    assert len(f1) == plan.k
    assert set(f1.edge_multiset()) == L.edge_set - l_minus_b
    merged = merge_F0_F1(f0, f1, plan, pp, cfg)
    assert len(merged) <= plan.k
    assert merged.edge_multiset() == L.edge_list()
    assert merged.all_linear(L.n)
    assert merged.meta["c_merge_holds"]
    piece_sets = [p.edge_set for p in pp.pieces]
    for f in merged.forests:
        outside = {e for e in f.edges if not set(e) & plan.B}
        assert not outside or any(outside <= s for s in piece_sets)


# --- cover --------------------------------------------------------------------

def test_cover_c6_is_the_cycle():
    cert, rep = cover(cycle(6))
    assert rep.optimal and rep.count == 1 and cert.cycles[0].edges == cycle(6).edge_set


def test_cover_k5_two_cycles():
    cert, rep = cover(complete(5), 0.99, PipelineConfig(seed=3))
    assert rep.optimal and rep.count == 2


def test_cover_k4_matches_oracle():
    _, rep = cover(complete(4))
    assert rep.optimal and rep.count == brute_force_min_cover(complete(4)) == 2


def test_cover_petersen_fails():
    with pytest.raises(PhaseFailure):
        cover(TOYS["Petersen"])


def test_cover_needs_edges():
    with pytest.raises(PreconditionViolated):
        cover(build_graph(3, []))


def test_cover_is_deterministic():
    g = sample_gnp(SampleSpec(120, 0.25, 4))
    cfg = PipelineConfig(seed=7)
    c1, r1 = cover(g, 0.25, cfg)
    c2, r2 = cover(g, 0.25, cfg)
    assert c1 == c2 and r1.to_json() == r2.to_json()


def test_cover_staged_route_reports_budget():
    g = sample_gnp(SampleSpec(150, 0.3, 1))
    with pytest.raises(BudgetExceeded):
        cover(g, 0.3, PipelineConfig(route="staged"))
    _, rep = cover(g, 0.3, PipelineConfig(route="auto"))
    assert rep.route == "direct" and any(p.name == "staged_route" for p in rep.phases)


def test_cover_parallel_matches_serial():
    g = sample_gnp(SampleSpec(100, 0.3, 2))
    c1, _ = cover(g, 0.3, PipelineConfig(seed=1))
    c2, _ = cover(g, 0.3, PipelineConfig(seed=1, jobs=2))
    assert c1 == c2


@settings(max_examples=60)
@given(graphs(min_n=3, max_n=9))
def test_cover_certificates_are_sound(g):
    if g.m == 0:
        return
    try:
        cert, rep = cover(g)
    except PhaseFailure:
        return
    vr = verify_cover(g, cert)
    assert vr.valid and rep.valid and rep.count == vr.count >= rep.target


# --- oracles ------------------------------------------------------------------

@pytest.mark.parametrize("g, want", [(cycle(5), 1), (complete(4), 2), (complete(5), 2), (build_graph(4, []), 0)])
def test_min_cover_examples(g, want):
    assert brute_force_min_cover(g) == want


def test_min_cover_uncoverable_and_large():
    assert brute_force_min_cover(build_graph(4, [(0, 1), (1, 2)])) == math.inf
    with pytest.raises(TooLarge):
        brute_force_min_cover(complete(9))


@pytest.mark.parametrize("n, count", [(3, 1), (4, 3), (5, 12), (6, 60), (7, 360)])
def test_cycle_enumeration_counts(n, count):
    # (n-1)!/2 Hamilton cycles in K_n
    assert len(enumerate_hamilton_cycles(complete(n))) == count
