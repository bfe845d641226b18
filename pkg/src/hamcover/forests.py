"""Linear-forest machinery: Konig colouring, cherry matchings, exact
decomposition around a high-degree core, greedy merging, and approximate
linear arboricity with a brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    DecompositionFailed,
    MatchingIncomplete,
    NotBipartite,
    PreconditionViolated,
    TooLarge,
)
from .forest_search import partition_into_linear_forests
from .graph import Cherry, Edge, Graph, LinearForest, canon, is_linear_forest
from .matching import bipartite_edge_coloring, greedy_edge_coloring, hopcroft_karp, misra_gries_coloring

PROVENANCES = ("F_0", "F_1", "merged", "generic")


@dataclass(frozen=True)
class Bipartition:
    side_a: frozenset[int]
    side_b: frozenset[int]

    def __post_init__(self):
        if self.side_a & self.side_b:
            raise ValueError("bipartition sides overlap")

    @classmethod
    def of(cls, a: Iterable[int], b: Iterable[int]) -> "Bipartition":
        return cls(frozenset(int(x) for x in a), frozenset(int(x) for x in b))


@dataclass(frozen=True)
class CherryMatching:
    cherries: tuple[Cherry, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for ch in self.cherries:
            for v in ch.vertices:
                if v in seen:
                    raise ValueError(f"cherries share vertex {v}")
                seen.add(v)

    @property
    def centers(self) -> frozenset[int]:
        return frozenset(c.center for c in self.cherries)

    @property
    def edges(self) -> list[Edge]:
        return [e for c in self.cherries for e in c.edges]


@dataclass
class ForestCollection:
    forests: list[LinearForest]
    provenance: str = "generic"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __len__(self) -> int:
        return len(self.forests)

    @classmethod
    def from_edge_classes(cls, classes: Iterable[Iterable[Edge]], provenance: str = "generic", **meta) -> "ForestCollection":
        return cls([LinearForest.from_edges(c) for c in classes], provenance, dict(meta))

    def edge_multiset(self) -> list[Edge]:
        return sorted(e for f in self.forests for e in f.edges)

    def is_partition_of(self, g: Graph) -> bool:
        es = self.edge_multiset()
        return len(es) == g.m and set(es) == g.edge_set

    def all_linear(self, n: int) -> bool:
        return all(is_linear_forest(f.edges, n) for f in self.forests)

    def to_json(self) -> dict:
        return {"provenance": self.provenance, "forests": [f.to_json() for f in self.forests]}


# --- Konig ------------------------------------------------------------------

def _check_bipartite(g: Graph, bp: Bipartition) -> None:
    for u, v in g.edge_list():
        if not ((u in bp.side_a and v in bp.side_b) or (u in bp.side_b and v in bp.side_a)):
            raise NotBipartite(_odd_cycle_or_edge(g, (u, v)))


def _odd_cycle_or_edge(g: Graph, bad: Edge) -> list[int]:
    """An odd cycle of g if there is one, else the offending edge."""
    colour: dict[int, int] = {}
    parent: dict[int, int] = {}
    for s in range(g.n):
        if s in colour or not g.degrees[s]:
            continue
        colour[s], parent[s] = 0, -1
        queue = [s]
        for x in queue:
            for y in sorted(g.adj[x]):
                if y not in colour:
                    colour[y], parent[y] = 1 - colour[x], x
                    queue.append(y)
                elif colour[y] == colour[x]:
                    px, py = [x], [y]
                    while px[-1] != -1:
                        px.append(parent[px[-1]])
                    while py[-1] != -1:
                        py.append(parent[py[-1]])
                    px, py = px[:-1], py[:-1]
                    common = set(px) & set(py)
                    while len(px) > 1 and px[-2] in common and py[-2] in common and px[-2] == py[-2]:
                        px.pop()
                        py.pop()
                    return px + py[::-1][1:]
    return list(bad)


def konig_edge_coloring(g: Graph, bp: Bipartition) -> list[list[Edge]]:
    """Partition a bipartite graph into exactly Delta matchings."""
    _check_bipartite(g, bp)
    delta = g.max_degree
    col = bipartite_edge_coloring(g.edge_list(), delta)
    out: list[list[Edge]] = [[] for _ in range(delta)]
    for e, c in col.items():
        out[c].append(e)
    for m in out:
        m.sort()
    return out


# --- cherries ---------------------------------------------------------------

def _cherries(bip_edges: Sequence[Edge], a_side: Iterable[int], centers: Sequence[int]) -> CherryMatching | None:
    """Cherries centred at every vertex of ``centers`` with leaves in ``a_side``, or None."""
    a_list = sorted(set(a_side))
    a_idx = {a: i for i, a in enumerate(a_list)}
    b_idx = {b: i for i, b in enumerate(centers)}
    nbrs: list[list[int]] = [[] for _ in centers]
    for u, v in bip_edges:
        if u in b_idx and v in a_idx:
            nbrs[b_idx[u]].append(a_idx[v])
        elif v in b_idx and u in a_idx:
            nbrs[b_idx[v]].append(a_idx[u])
    for lst in nbrs:
        lst.sort()
    left = [nbrs[i // 2] for i in range(2 * len(centers))]
    ml, _ = hopcroft_karp(left, len(a_list))
    if any(x < 0 for x in ml):
        return None
    return CherryMatching(tuple(
        Cherry(b, (a_list[ml[2 * i]], a_list[ml[2 * i + 1]])) for i, b in enumerate(centers)
    ))


def cherry_matching(g: Graph, bp: Bipartition) -> CherryMatching:
    """Disjoint cherries centred at every vertex of B, leaves in A."""
    deg = g.degrees
    b_sorted = sorted(bp.side_b)
    a_sorted = sorted(bp.side_a)
    if b_sorted:
        a_max = max(a_sorted, key=lambda a: (deg[a], -a), default=None)
        b_min = min(b_sorted, key=lambda b: (deg[b], b))
        if a_max is not None and deg[b_min] < 2 * deg[a_max]:
            raise PreconditionViolated(
                f"deg({b_min})={deg[b_min]} < 2*deg({a_max})={2 * deg[a_max]}", (a_max, b_min)
            )
        if deg[b_min] < 2:
            raise PreconditionViolated(f"centre {b_min} has degree {deg[b_min]} < 2", (None, b_min))
    _check_bipartite(g, bp)
    cm = _cherries(g.edge_list(), a_sorted, b_sorted)
    if cm is None:
        raise MatchingIncomplete("Hall condition failed despite the degree check")
    return cm


# --- exact decomposition around a core --------------------------------------

def _check_core(g: Graph, bp: Bipartition, core_ratio: float) -> None:
    sides = bp.side_a | bp.side_b
    for v in range(g.n):
        if g.degrees[v] and v not in sides:
            raise PreconditionViolated(f"vertex {v} is in neither side", v)
    for u, v in g.edge_list():
        if u in bp.side_a and v in bp.side_a:
            raise PreconditionViolated(f"A is not independent: edge {(u, v)}", (u, v))
    cap = core_ratio * g.max_degree
    into_b: dict[int, int] = {}
    for u, v in g.edge_list():
        if v in bp.side_b:
            into_b[u] = into_b.get(u, 0) + 1
        if u in bp.side_b:
            into_b[v] = into_b.get(v, 0) + 1
    for x in sorted(into_b):
        if into_b[x] > cap:
            raise PreconditionViolated(
                f"vertex {x} has {into_b[x]} neighbours in B > {cap:g}", x
            )


def decompose_with_core(
    g: Graph,
    bp: Bipartition,
    core_ratio: float = 0.01,
    *,
    high_fraction: float = 0.25,
    seed: int = 0,
    search_steps: int = 200_000,
) -> ForestCollection:
    """Split E(g) into exactly ceil(Delta/2) linear forests.

    Follows the constructive proof: matchings of g[B] joined with cherry
    matchings over the high part of B, then a doubled-B Konig split of the
    remaining bipartite graph. If a constructive step fails at this size the
    same target is reached by local search (``meta['route']`` says which).
    """
    _check_core(g, bp, core_ratio)
    delta = g.max_degree
    target = math.ceil(delta / 2)
    if delta == 0:
        return ForestCollection([], "F_1", {"route": "proof", "t": 0})
    try:
        classes, t = _core_construction(g, bp, high_fraction)
        route = "proof"
    except (MatchingIncomplete, DecompositionFailed) as exc:
        classes, stats = partition_into_linear_forests(g.n, g.edge_list(), target, seed=seed, max_steps=search_steps)
        if classes is None:
            raise DecompositionFailed(f"construction failed ({exc}) and local search ran out of steps") from exc
        route, t = "search", None
    fc = ForestCollection.from_edge_classes(classes, "F_1", route=route, t=t)
    assert len(fc) == target and fc.is_partition_of(g)
    return fc


def _core_construction(g: Graph, bp: Bipartition, high_fraction: float) -> tuple[list[list[Edge]], int]:
    delta = g.max_degree
    target = math.ceil(delta / 2)
    B = bp.side_b
    inner = [e for e in g.edge_list() if e[0] in B and e[1] in B]
    cross = [e for e in g.edge_list() if not (e[0] in B and e[1] in B)]
    col = greedy_edge_coloring(inner)
    t = max(col.values(), default=-1) + 1
    k = target - t
    if k < 0:
        raise DecompositionFailed(f"g[B] needs {t} matchings > ceil(Delta/2) = {target}")
    matchings: list[list[Edge]] = [[] for _ in range(t)]
    for e, c in col.items():
        matchings[c].append(e)

    deg_a: dict[int, int] = {}
    for u, v in cross:
        b = u if u in B else v
        deg_a[b] = deg_a.get(b, 0) + 1
    b_high = sorted(b for b in B if deg_a.get(b, 0) >= high_fraction * delta)
    remaining = set(cross)
    forests: list[list[Edge]] = []
    for i in range(t):
        m_i = matchings[i]
        if b_high:
            cm = _cherries(sorted(remaining), bp.side_a, b_high)
            if cm is None:
                raise MatchingIncomplete(f"cherry matching {i} does not cover B_high")
            on_m = {x for e in m_i for x in e}
            f_i = list(m_i)
            for ch in cm.cherries:
                # a centre already matched inside B keeps only one leaf
                leaves = ch.leaves[:1] if ch.center in on_m else ch.leaves
                f_i.extend(canon(ch.center, a) for a in leaves)
        else:
            f_i = list(m_i)
        remaining.difference_update(f_i)
        forests.append(f_i)

    # doubled-B split of the residual bipartite graph with k colours
    rest = sorted(remaining)
    by_b: dict[int, list[int]] = {}
    for u, v in rest:
        b, a = (u, v) if u in B else (v, u)
        by_b.setdefault(b, []).append(a)
    n = g.n
    aux: list[Edge] = []
    origin: dict[Edge, Edge] = {}
    for b, leaves in by_b.items():
        for j, a in enumerate(sorted(leaves)):
            node = n + b if j % 2 == 0 else 2 * n + b
            aux.append((a, node))
            origin[(a, node)] = canon(a, b)
    aux_deg: dict[int, int] = {}
    for x, y in aux:
        aux_deg[x] = aux_deg.get(x, 0) + 1
        aux_deg[y] = aux_deg.get(y, 0) + 1
    if max(aux_deg.values(), default=0) > k:
        raise DecompositionFailed(f"residual split has degree {max(aux_deg.values())} > {k}")
    if k == 0:
        if aux:
            raise DecompositionFailed("no colours left for the residual graph")
        return forests, t
    colouring = bipartite_edge_coloring(aux, k)
    classes = [[] for _ in range(k)]
    for (x, y), c in colouring.items():
        classes[c].append(origin[(min(x, y), max(x, y))])
    return forests + classes, t


# --- merging ----------------------------------------------------------------

def merge_edges_into_forests(collection: ForestCollection, h: Graph, d: int) -> ForestCollection:
    """Insert every edge of h into a forest where both its ends are isolated."""
    q = len(collection)
    if q < 4 * d + 1:
        raise PreconditionViolated(f"{q} forests < 4d+1 = {4 * d + 1}", q)
    union_deg: dict[int, int] = {}
    for f in collection.forests:
        for u, v in f.edges:
            union_deg[u] = union_deg.get(u, 0) + 1
            union_deg[v] = union_deg.get(v, 0) + 1
    for v in range(h.n):
        if h.degrees[v] > d:
            raise PreconditionViolated(f"vertex {v} has degree {h.degrees[v]} > {d} in h", v)
        if h.degrees[v] and union_deg.get(v, 0) > d:
            raise PreconditionViolated(f"vertex {v} has degree {union_deg[v]} > {d} in the forests", v)
    edge_sets = [set(f.edges) for f in collection.forests]
    touched = [{x for e in es for x in e} for es in edge_sets]
    present = set().union(*edge_sets)
    for u, v in h.edge_list():
        if (u, v) in present:
            continue
        for i in range(q):
            if u not in touched[i] and v not in touched[i]:
                edge_sets[i].add((u, v))
                touched[i].update((u, v))
                assert is_linear_forest(edge_sets[i], max(h.n, u + 1, v + 1))
                break
        else:
            raise AssertionError("no forest isolates both ends; degree bound broken")
    return ForestCollection([LinearForest.from_edges(es) for es in edge_sets], "merged", dict(collection.meta))


# --- approximate linear arboricity ------------------------------------------

def _greedy_insert(classes: list[set[Edge]], e: Edge, n: int) -> bool:
    u, v = e
    for es in classes:
        du = sum(1 for f in es if u in f)
        dv = sum(1 for f in es if v in f)
        if du < 2 and dv < 2 and is_linear_forest(es | {e}, n):
            es.add(e)
            return True
    return False


def approx_linear_arboricity(
    g: Graph, eps: float, *, seed: int = 0, search_steps: int = 50_000
) -> ForestCollection:
    """Constructive (1+eps)Delta/2 linear-forest decomposition.

    Colour properly with at most Delta+1 colours, pair the colour classes, cut
    one edge from each resulting even cycle, reinsert the cut edges greedily,
    then compact by local search. ``meta['achieved']`` reports whether the
    count meets ceil((1+eps)Delta/2); ``meta['fallback']`` is the negation.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    delta = g.max_degree
    if g.m == 0:
        return ForestCollection([], "generic", {"achieved": True, "fallback": False, "bound": 0})
    bound = max(math.ceil((1 + eps) * delta / 2 - 1e-12), 1)
    col = misra_gries_coloring(g.edge_list())
    ncol = max(col.values()) + 1
    by_c: list[list[Edge]] = [[] for _ in range(ncol)]
    for e, c in col.items():
        by_c[c].append(e)
    classes: list[set[Edge]] = []
    cut: list[Edge] = []
    for i in range(0, ncol, 2):
        es = set(by_c[i]) | (set(by_c[i + 1]) if i + 1 < ncol else set())
        kept, removed = _break_cycles(es)
        classes.append(kept)
        cut.extend(removed)
    for e in sorted(cut):
        if not _greedy_insert(classes, e, g.n):
            classes.append({e})
    classes = [c for c in classes if c]
    floor = math.ceil(delta / 2)
    # compaction: try to drop one forest at a time down to the trivial lower bound
    while len(classes) > floor:
        k = len(classes) - 1
        initial = {e: i for i, es in enumerate(classes[:k]) for e in es}
        res, _ = partition_into_linear_forests(
            g.n, g.edge_list(), k, initial=initial, seed=seed + k, max_steps=search_steps
        )
        if res is None:
            break
        classes = [set(c) for c in res if c]
    achieved = len(classes) <= bound
    fc = ForestCollection.from_edge_classes(
        [sorted(c) for c in classes], "generic", achieved=achieved, fallback=not achieved, bound=bound
    )
    return fc


def _break_cycles(es: set[Edge]) -> tuple[set[Edge], list[Edge]]:
    """Delete the smallest edge of every cycle in a max-degree-2 edge set."""
    nb: dict[int, list[int]] = {}
    for u, v in es:
        nb.setdefault(u, []).append(v)
        nb.setdefault(v, []).append(u)
    seen: set[int] = set()
    removed: list[Edge] = []
    for s in sorted(nb):
        if s in seen:
            continue
        comp = []
        stack = [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in nb[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if all(len(nb[x]) == 2 for x in comp):
            cyc_edges = sorted({canon(x, y) for x in comp for y in nb[x]})
            removed.append(cyc_edges[0])
    return es - set(removed), removed


# --- oracle -----------------------------------------------------------------

def brute_force_linear_arboricity(g: Graph, max_edges: int = 20) -> tuple[int, ForestCollection]:
    """Exact linear arboricity by exhaustive assignment with symmetry breaking."""
    if g.m > max_edges:
        raise TooLarge(f"{g.m} edges > {max_edges}")
    edges = g.edge_list()
    if not edges:
        return 0, ForestCollection([], "generic")
    lower = math.ceil(g.max_degree / 2)
    # a vertex of max degree first helps pruning
    order = sorted(edges, key=lambda e: (-(g.degrees[e[0]] + g.degrees[e[1]]), e))
    for k in range(max(lower, 1), len(edges) + 1):
        sol = _assign(order, k, g.n)
        if sol is not None:
            return k, ForestCollection.from_edge_classes(sol, "generic")
    raise AssertionError("unreachable: one forest per edge always works")


def _assign(order: list[Edge], k: int, n: int) -> list[list[Edge]] | None:
    parent = [[list(range(n))] for _ in range(k)]
    deg = [[0] * n for _ in range(k)]
    classes: list[list[Edge]] = [[] for _ in range(k)]

    def root(c: int, x: int) -> int:
        p = parent[c][-1]
        while p[x] != x:
            x = p[x]
        return x

    def rec(i: int, used: int) -> bool:
        if i == len(order):
            return True
        u, v = order[i]
        for c in range(min(used + 1, k)):
            if deg[c][u] >= 2 or deg[c][v] >= 2:
                continue
            ru, rv = root(c, u), root(c, v)
            if ru == rv:
                continue
            p = parent[c][-1][:]
            p[ru] = rv
            parent[c].append(p)
            deg[c][u] += 1
            deg[c][v] += 1
            classes[c].append((u, v))
            if rec(i + 1, max(used, c + 1)):
                return True
            classes[c].pop()
            deg[c][u] -= 1
            deg[c][v] -= 1
            parent[c].pop()
        return False

    return [list(c) for c in classes] if rec(0, 0) else None
