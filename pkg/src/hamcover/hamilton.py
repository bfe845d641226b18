"""Hamilton-cycle search with prescribed edges, cycle packing, disjoint pair
connection and the four-phase extension of a linear forest.

The search engine is Posa rotation-extension over a graph where some edges are
forced. Forced edges form vertex-disjoint blocks (paths) that may only be
entered at their ends and are never broken by a rotation. Before searching,
forcing is propagated: a vertex of degree two forces both its edges, and a
vertex with two forced edges loses all its other edges.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ConnectionFailed, PhaseFailure, PreconditionViolated, SearchFailed
from .graph import Edge, Graph, HamiltonCycle, LinearForest
from .seeding import derive_seed


# --- forced-edge propagation ------------------------------------------------

class _Infeasible(Exception):
    pass


def _propagate(n: int, adj: list[set[int]], forced: Iterable[Edge]) -> list[list[int]]:
    """Close ``forced`` under the degree rules, pruning ``adj`` in place.

    Returns per-vertex forced neighbour lists. Raises _Infeasible on a
    contradiction (degree < 2, three forced edges, or a short forced cycle).
    """
    fnb: list[list[int]] = [[] for _ in range(n)]
    queue: list[int] = list(range(n))

    def force(u: int, v: int) -> None:
        if v in fnb[u]:
            return
        if v not in adj[u]:
            raise _Infeasible(f"forced non-edge {(u, v)}")
        fnb[u].append(v)
        fnb[v].append(u)
        queue.append(u)
        queue.append(v)

    for u, v in forced:
        force(u, v)
    while queue:
        v = queue.pop()
        fv = fnb[v]
        if len(fv) > 2:
            raise _Infeasible(f"vertex {v} has {len(fv)} forced edges")
        if len(adj[v]) < 2:
            raise _Infeasible(f"vertex {v} has degree {len(adj[v])}")
        if len(adj[v]) == 2:
            for w in list(adj[v]):
                force(v, w)
        if len(fv) == 2 and len(adj[v]) > 2:
            for w in list(adj[v]):
                if w not in fv:
                    adj[v].discard(w)
                    adj[w].discard(v)
                    queue.append(w)
    # forced edges must be a linear forest, or a single spanning cycle
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    closed = 0
    for u in range(n):
        for v in fnb[u]:
            if u < v:
                ru, rv = find(u), find(v)
                if ru == rv:
                    closed += 1
                else:
                    parent[ru] = rv
    if closed:
        total = sum(len(x) for x in fnb) // 2
        if not (closed == 1 and total == n):
            raise _Infeasible("forced edges close a short cycle")
    return fnb


# --- Posa search ------------------------------------------------------------

def _forced_cycle_order(fnb: list[list[int]]) -> list[int]:
    order = [0]
    prev = -1
    while True:
        cur = order[-1]
        nxt = fnb[cur][0] if fnb[cur][0] != prev else fnb[cur][1]
        if nxt == 0:
            return order
        order.append(nxt)
        prev = cur


def _posa(
    n: int,
    adj: list[set[int]],
    fnb: list[list[int]],
    rng: random.Random,
    budget: int,
    stall: int,
) -> tuple[list[int] | None, int]:
    """Rotation-extension search. Returns (cycle order or None, steps used)."""
    nbrs = [sorted(a) for a in adj]
    starts = [v for v in range(n) if len(fnb[v]) <= 1]
    if not starts:
        return None, 0
    steps = 0
    while steps < budget:
        onpath = [False] * n
        pos = [-1] * n
        offdeg = [len(a) for a in nbrs]
        P: list[int] = []

        def add(z: int) -> None:
            onpath[z] = True
            pos[z] = len(P)
            P.append(z)
            for w in nbrs[z]:
                offdeg[w] -= 1

        def reindex(lo: int) -> None:
            for i in range(lo, len(P)):
                pos[P[i]] = i

        def open_cycle() -> bool:
            # P plus edge P[-1]P[0] is a cycle; reopen it next to an off-path vertex
            L = len(P)
            closing_forced = P[0] in fnb[P[-1]]
            idx = [j for j in range(L) if offdeg[P[j]] > 0]
            rng.shuffle(idx)
            for j in idx:
                x = P[j]
                zs = [z for z in nbrs[x] if not onpath[z]]
                if not zs:
                    continue
                for side in (1, -1):
                    jj = (j + side) % L
                    y = P[jj]
                    is_closing = {j, jj} == {0, L - 1}
                    if (is_closing and closing_forced) or (not is_closing and y in fnb[x]):
                        continue
                    if side == 1:
                        new = P[j + 1:] + P[: j + 1]
                    else:
                        new = P[j:] + P[:j]
                        new.reverse()
                    P[:] = new
                    reindex(0)
                    add(min(zs, key=lambda z: (offdeg[z], rng.random())))
                    return True
            return False

        add(rng.choice(starts))
        since_growth = 0
        while steps < budget and since_growth <= stall:
            steps += 1
            v = P[-1]
            pend = [w for w in fnb[v] if len(P) < 2 or w != P[-2]]
            if pend:
                w = pend[0]
                if not onpath[w]:
                    add(w)
                    since_growth = 0
                    continue
                if w == P[0]:
                    if len(P) == n:
                        return P, steps
                    if open_cycle():
                        since_growth = 0
                        continue
                break  # dead end: restart
            if len(P) == n:
                if P[0] in adj[v]:
                    return P, steps
            else:
                cands = [z for z in nbrs[v] if not onpath[z]]
                if cands:
                    if rng.random() < 0.1:
                        z = rng.choice(cands)
                    else:
                        best = min(offdeg[z] for z in cands)
                        z = rng.choice([c for c in cands if offdeg[c] == best])
                    add(z)
                    since_growth = 0
                    continue
                if len(P) >= 3 and P[0] in adj[v] and open_cycle():
                    since_growth = 0
                    continue
            # rotation at the P[-1] end
            L = len(P)
            opts = []
            good = []
            for u in nbrs[v]:
                i = pos[u]
                if not onpath[u] or i >= L - 2:
                    continue
                e = P[i + 1]
                if e in fnb[u]:
                    continue
                opts.append(i)
                if L == n:
                    if P[0] in adj[e]:
                        good.append(i)
                elif offdeg[e] > 0 or P[0] in adj[e]:
                    good.append(i)
            if not opts:
                break
            i = rng.choice(good) if good and rng.random() < 0.9 else rng.choice(opts)
            P[i + 1:] = P[i + 1:][::-1]
            reindex(i + 1)
            since_growth += 1
    return None, steps


def _default_budget(n: int) -> int:
    return 200 * n + 2_000


def _hamilton_cycle(
    n: int,
    adj: list[set[int]],
    forced: Iterable[Edge] = (),
    seed: int = 0,
    budget: int | None = None,
) -> list[int]:
    """Cycle order through all ``n`` vertices using every forced edge.

    ``adj`` is copied. Raises SearchFailed.
    """
    if n < 3:
        raise SearchFailed(0, "fewer than 3 vertices")
    budget = _default_budget(n) if budget is None else budget
    adj = [set(a) for a in adj]
    try:
        fnb = _propagate(n, adj, forced)
    except _Infeasible as exc:
        raise SearchFailed(0, str(exc)) from None
    if all(len(x) == 2 for x in fnb):
        return _forced_cycle_order(fnb)
    rng = random.Random(seed)
    order, used = _posa(n, adj, fnb, rng, budget, stall=max(50, 2 * n))
    if order is None:
        raise SearchFailed(used, f"no Hamilton cycle within {budget} steps")
    return order


def _adjacency(g: Graph) -> list[set[int]]:
    return [set(a) for a in g.adj]


def find_hamilton_cycle(g: Graph, seed: int = 0, budget: int | None = None, forced: Iterable[Edge] = ()) -> HamiltonCycle:
    """A Hamilton cycle of g containing every edge of ``forced``; raises SearchFailed."""
    order = _hamilton_cycle(g.n, _adjacency(g), forced, seed, budget)
    return HamiltonCycle.of(order)


def _cut_cycle(order: list[int], x: int, y: int) -> list[int]:
    """Turn a cycle containing the edge xy into the path x..y."""
    L = len(order)
    i = order.index(x)
    if order[(i + 1) % L] == y:
        path = order[i::-1] + order[:i:-1]
    else:
        path = order[i:] + order[:i]
    assert path[0] == x and path[-1] == y
    return path


def _hamilton_path(n: int, adj: list[set[int]], x: int, y: int, seed: int, budget: int | None) -> list[int]:
    if x == y:
        raise ValueError("endpoints must differ")
    if n == 2:
        if y in adj[x]:
            return [x, y]
        raise SearchFailed(0, "no edge between the two vertices")
    adj = [set(a) for a in adj]
    adj[x].add(y)
    adj[y].add(x)
    order = _hamilton_cycle(n, adj, [(x, y)], seed, budget)
    return _cut_cycle(order, x, y)


def hamilton_path_between(g: Graph, x: int, y: int, seed: int = 0, budget: int | None = None) -> list[int]:
    """Hamilton path from x to y; raises SearchFailed."""
    return _hamilton_path(g.n, _adjacency(g), x, y, seed, budget)


# --- packing ----------------------------------------------------------------

@dataclass
class PackingResult:
    cycles: list[HamiltonCycle]
    leftover: Graph
    achieved: int
    target: int
    attempts: int = 0

    @property
    def shortfall(self) -> int:
        return self.target - self.achieved


def pack_hamilton_cycles(
    g: Graph,
    target: int | None = None,
    seed: int = 0,
    retries: int = 20,
    rollback: int = 2,
    budget: int | None = None,
) -> PackingResult:
    """Extract edge-disjoint Hamilton cycles one at a time.

    On a failed extraction the last ``rollback`` cycles are returned to the
    graph and the search resumes with fresh seeds; the largest packing seen is
    kept when ``retries`` runs out.
    """
    limit = g.min_degree // 2 if g.n >= 3 else 0
    target = limit if target is None else target
    if target > limit:
        raise PreconditionViolated(f"target {target} exceeds floor(delta/2) = {limit}", target)
    adj = _adjacency(g)
    cycles: list[list[int]] = []
    best: list[list[int]] = []
    attempt = 0
    failures = 0
    while len(cycles) < target:
        attempt += 1
        try:
            order = _hamilton_cycle(g.n, adj, (), derive_seed(seed, "pack", len(cycles), attempt), budget)
        except SearchFailed:
            failures += 1
            if failures > retries:
                break
            for _ in range(min(rollback, len(cycles))):
                _restore_cycle(adj, cycles.pop())
            continue
        _remove_cycle(adj, order)
        cycles.append(order)
        if len(cycles) > len(best):
            best = list(cycles)
    if len(cycles) < len(best):
        cycles = best
    hc = [HamiltonCycle.of(c) for c in cycles]
    used = set().union(*(c.edges for c in hc)) if hc else set()
    leftover = Graph.from_edges(g.n, (e for e in g.edge_list() if e not in used))
    return PackingResult(hc, leftover, len(hc), target, attempt)


def _cycle_edges(order: Sequence[int]):
    L = len(order)
    for i in range(L):
        yield order[i], order[(i + 1) % L]


def _remove_cycle(adj: list[set[int]], order: Sequence[int]) -> None:
    for u, v in _cycle_edges(order):
        adj[u].discard(v)
        adj[v].discard(u)


def _restore_cycle(adj: list[set[int]], order: Sequence[int]) -> None:
    for u, v in _cycle_edges(order):
        adj[u].add(v)
        adj[v].add(u)


# --- disjoint pair connection ------------------------------------------------

@dataclass(frozen=True)
class PairSet:
    pairs: tuple[tuple[int, int], ...]
    forbidden: frozenset[int] = frozenset()

    def __post_init__(self):
        flat = [x for p in self.pairs for x in p]
        if len(flat) != len(set(flat)):
            raise ValueError("pair endpoints must be pairwise distinct")


def _connect(adj: Sequence[Iterable[int]], ps: PairSet, rng: random.Random, attempts: int) -> tuple[list[list[int]] | None, int, int]:
    endpoints = {x for p in ps.pairs for x in p}
    best_done = 0
    steps = 0
    order = list(range(len(ps.pairs)))
    for _ in range(attempts):
        blocked = set(ps.forbidden) | endpoints
        paths: list[list[int] | None] = [None] * len(ps.pairs)
        done = 0
        for idx in order:
            a, b = ps.pairs[idx]
            prev = {a: a}
            frontier = [a]
            found = False
            while frontier and not found:
                nxt = []
                for x in frontier:
                    steps += 1
                    nb = list(adj[x])
                    rng.shuffle(nb)
                    for y in nb:
                        if y == b:
                            prev[b] = x
                            found = True
                            break
                        if y not in prev and y not in blocked:
                            prev[y] = x
                            nxt.append(y)
                    if found:
                        break
                frontier = nxt
            if not found:
                break
            path = [b]
            while path[-1] != a:
                path.append(prev[path[-1]])
            path.reverse()
            blocked.update(path)
            paths[idx] = path
            done += 1
        if done == len(ps.pairs):
            return paths, steps, done  # type: ignore[return-value]
        best_done = max(best_done, done)
        # hardest pair first next time
        order.remove(idx)
        order.insert(0, idx)
    return None, steps, best_done


def connect_pairs_disjoint(g: Graph, ps: PairSet, seed: int = 0, budget: int = 50) -> list[list[int]]:
    """Internally disjoint paths joining each pair, avoiding ``ps.forbidden``.

    ``budget`` is the number of sequential routing attempts. Raises
    ConnectionFailed with the best number of completed pairs.
    """
    if not ps.pairs:
        return []
    for x in (x for p in ps.pairs for x in p):
        if not 0 <= x < g.n:
            raise ValueError(f"vertex {x} not in graph")
    adj = [sorted(a) for a in g.adj]
    paths, steps, done = _connect(adj, ps, random.Random(seed), budget)
    if paths is None:
        raise ConnectionFailed(steps, done)
    return paths


# --- forest extension --------------------------------------------------------

@dataclass
class ExtensionPlan:
    u1: frozenset[int]
    u2: frozenset[int]
    u3: frozenset[int]
    limit_1: int
    limit_2: int
    seed: int = 0
    connect_attempts: int = 50
    search_budget: int | None = None


def make_extension_plan(
    g: Graph,
    f: LinearForest,
    seed: int = 0,
    limit_1: int | None = None,
    limit_2: int | None = None,
    connect_attempts: int = 50,
    search_budget: int | None = None,
) -> ExtensionPlan:
    """Split the vertices outside V(f) uniformly at random into three reserves."""
    n = g.n
    rest = [v for v in range(n) if v not in f.vertices]
    rng = random.Random(derive_seed(seed, "reserve"))
    parts: list[list[int]] = [[], [], []]
    for v in rest:
        parts[rng.randrange(3)].append(v)
    if limit_1 is None:
        limit_1 = max(1, n // 20)
    if limit_2 is None:
        limit_2 = max(1, int(n / (10 * math.log(max(n, 3)))))
    return ExtensionPlan(
        frozenset(parts[0]), frozenset(parts[1]), frozenset(parts[2]),
        limit_1, limit_2, seed, connect_attempts, search_budget,
    )


@dataclass
class ExtensionResult:
    cycle: HamiltonCycle
    route: str
    phases: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=dict)


def check_extension_hypotheses(g: Graph, f: LinearForest, np_: float, rho_v: float, rho_d: float) -> dict:
    """Reserve size and per-vertex outside degree, as ratios to their thresholds."""
    outside = [v for v in range(g.n) if v not in f.vertices]
    out_set = set(outside)
    min_out = min((len(g.adj[v] & out_set) for v in range(g.n)), default=0)
    return {
        "outside": len(outside),
        "outside_needed": rho_v * g.n,
        "min_outside_degree": min_out,
        "outside_degree_needed": rho_d * np_,
        "holds": len(outside) >= rho_v * g.n and min_out >= rho_d * np_,
    }


class _Paths:
    """Mutable set of vertex-disjoint paths with an endpoint index."""

    def __init__(self, paths: Iterable[Sequence[int]]):
        self.paths: dict[int, list[int]] = {}
        self.owner: dict[int, int] = {}
        self._next = 0
        for p in paths:
            self._put(list(p))

    def _put(self, p: list[int]) -> int:
        i = self._next
        self._next += 1
        self.paths[i] = p
        self.owner[p[0]] = i
        self.owner[p[-1]] = i
        return i

    def _take(self, i: int) -> list[int]:
        p = self.paths.pop(i)
        self.owner.pop(p[0], None)
        self.owner.pop(p[-1], None)
        return p

    def __len__(self) -> int:
        return len(self.paths)

    def is_end(self, v: int) -> bool:
        return v in self.owner

    def join(self, x: int, y: int, middle: Sequence[int] = ()) -> None:
        """Join the path ending at x to the one ending at y through ``middle``."""
        i, j = self.owner[x], self.owner[y]
        assert i != j
        p, q = self._take(i), self._take(j)
        if p[-1] != x:
            p.reverse()
        if q[0] != y:
            q.reverse()
        self._put(p + list(middle) + q)

    def ordered(self) -> list[list[int]]:
        return [self.paths[i] for i in sorted(self.paths)]


def extend_forest_to_hamilton(
    g: Graph,
    f: LinearForest,
    plan: ExtensionPlan,
    *,
    p: float | None = None,
    rho_v: float = 0.0,
    rho_d: float = 0.0,
    strict: bool = True,
) -> ExtensionResult:
    """Hamilton cycle of g containing every edge of f, built in four phases.

    1. join path endpoints by edges of g down to ``limit_1`` components;
    2. absorb U_1 vertices adjacent to two path ends, down to ``limit_2``;
    3. chain consecutive paths through U_2 by disjoint connecting paths;
    4. close the chain with a Hamilton path through everything left.

    With ``strict`` a failed hypothesis raises PreconditionViolated; otherwise
    it is only recorded.
    """
    missing = [e for e in f.edges if not g.has_edge(*e)]
    if missing:
        raise PreconditionViolated(f"forest edges {missing[:3]} not in g", missing[0])
    n = g.n
    np_ = p * n if p is not None else 2 * g.m / max(n, 1)
    hyp = check_extension_hypotheses(g, f, np_, rho_v, rho_d)
    if strict and not hyp["holds"]:
        raise PreconditionViolated(f"extension hypotheses fail: {hyp}", hyp)
    rng = random.Random(derive_seed(plan.seed, "extend"))
    phases: dict = {}
    paths = _Paths(f.paths)
    phases["initial_components"] = len(paths)

    # phase 1: edges of g between ends of distinct paths
    ends = sorted(paths.owner)
    rng.shuffle(ends)
    for x in ends:
        if len(paths) <= plan.limit_1:
            break
        if not paths.is_end(x):
            continue
        nb = sorted(g.adj[x])
        rng.shuffle(nb)
        for y in nb:
            if paths.is_end(y) and paths.owner[y] != paths.owner[x]:
                paths.join(x, y)
                break
    phases["after_phase_1"] = len(paths)

    # phase 2: a U_1 vertex adjacent to two ends of distinct paths
    used_u1: set[int] = set()
    for u in sorted(plan.u1):
        if len(paths) <= plan.limit_2:
            break
        hits: dict[int, int] = {}
        for y in sorted(g.adj[u]):
            if paths.is_end(y):
                hits.setdefault(paths.owner[y], y)
                if len(hits) == 2:
                    break
        if len(hits) == 2:
            x, y = hits.values()
            paths.join(x, y, [u])
            used_u1.add(u)
    phases["after_phase_2"] = len(paths)

    # phase 3: connect b_i to a_{i+1} through U_2
    chain = paths.ordered()
    u2 = set(plan.u2)
    if len(chain) > 1:
        # a one-vertex path needs distinct ends: grow it by a U_2 neighbour
        for q in chain:
            if len(q) == 1:
                w = min((w for w in g.adj[q[0]] if w in u2), default=None)
                if w is None:
                    raise PhaseFailure(3, {"reason": f"isolated path at {q[0]} has no U_2 neighbour"})
                u2.discard(w)
                q.append(w)
    if len(chain) > 1:
        pairs = tuple((chain[i][-1], chain[i + 1][0]) for i in range(len(chain) - 1))
        if any(a == b for a, b in pairs):
            raise PhaseFailure(3, {"reason": "degenerate pair"})
        ps = PairSet(pairs, frozenset(v for v in range(n) if v not in u2))
        adj = [sorted(a) for a in g.adj]
        links, steps, done = _connect(adj, ps, rng, plan.connect_attempts)
        if links is None:
            raise PhaseFailure(3, {"pairs": len(pairs), "connected": done, "u2": len(plan.u2)})
        big = list(chain[0])
        for i, link in enumerate(links):
            big.extend(link[1:-1])
            big.extend(chain[i + 1])
    else:
        big = list(chain[0]) if chain else []
    phases["chain_length"] = len(big)

    # phase 4: Hamilton path between the chain's ends through the rest
    on_big = set(big)
    rest = [v for v in range(n) if v not in on_big]
    if not big:
        order = _hamilton_cycle(n, _adjacency(g), (), derive_seed(plan.seed, "phase4"), plan.search_budget)
        return ExtensionResult(HamiltonCycle.of(order), "phases", phases, hyp)
    a, b = big[0], big[-1]
    if not rest:
        if len(big) >= 3 and g.has_edge(a, b):
            hc = HamiltonCycle.of(big)
            assert f.edges <= hc.edges
            return ExtensionResult(hc, "phases", phases, hyp)
        raise PhaseFailure(4, {"remaining": 0, "reason": "chain ends not adjacent"})
    if a == b:
        # one isolated vertex so far: absorb it into a cycle on the rest
        local = rest + [a]
    else:
        local = [b] + rest + [a]
    idx = {v: i for i, v in enumerate(local)}
    sub = [set() for _ in local]
    for v in local:
        for w in g.adj[v]:
            j = idx.get(w)
            if j is not None:
                sub[idx[v]].add(j)
    if a != b:
        sub[idx[a]].discard(idx[b])
        sub[idx[b]].discard(idx[a])
    try:
        if a == b:
            order = _hamilton_cycle(len(local), sub, (), derive_seed(plan.seed, "phase4"), plan.search_budget)
            tail = [local[i] for i in order]
            k = tail.index(a)
            cyc = tail[k:] + tail[:k]
        else:
            path = _hamilton_path(len(local), sub, idx[b], idx[a], derive_seed(plan.seed, "phase4"), plan.search_budget)
            cyc = big + [local[i] for i in path[1:-1]]
    except SearchFailed as exc:
        raise PhaseFailure(4, {"remaining": len(rest), "steps": exc.steps_used}) from None
    hc = HamiltonCycle.of(cyc)
    assert f.edges <= hc.edges
    phases["used_u1"] = len(used_u1)
    return ExtensionResult(hc, "phases", phases, hyp)


def extend_directly(g: Graph, f: LinearForest, seed: int = 0, budget: int | None = None) -> HamiltonCycle:
    """Hamilton cycle of g through f by one search with f's edges forced."""
    order = _hamilton_cycle(g.n, _adjacency(g), sorted(f.edges), seed, budget)
    hc = HamiltonCycle.of(order)
    assert f.edges <= hc.edges
    return hc
