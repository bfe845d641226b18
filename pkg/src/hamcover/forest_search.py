"""Min-conflicts search for a partition of an edge set into k linear forests.

Each colour class keeps, per vertex, its neighbour list and, for path
endpoints, the opposite endpoint of the path. Inserting an edge checks
degree and same-path conflicts in O(1); evicting an edge walks the path to
refresh the endpoint map.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Edge, canon


@dataclass
class SearchStats:
    steps: int = 0
    evictions: int = 0
    solved: bool = False


class ForestState:
    """k colour classes over vertices 0..n-1, each kept a linear forest."""

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        self.nb: list[list[list[int]]] = [[[] for _ in range(n)] for _ in range(k)]
        # end[c][v]: other end of v's path when deg_c(v) <= 1, else -1
        self.end: list[list[int]] = [list(range(n)) for _ in range(k)]
        self.colour: dict[Edge, int] = {}

    def deg(self, c: int, v: int) -> int:
        return len(self.nb[c][v])

    def can_insert(self, c: int, u: int, v: int) -> bool:
        nb = self.nb[c]
        return len(nb[u]) < 2 and len(nb[v]) < 2 and self.end[c][u] != v

    def insert(self, c: int, u: int, v: int) -> None:
        end = self.end[c]
        a, b = end[u], end[v]
        self.nb[c][u].append(v)
        self.nb[c][v].append(u)
        end[a], end[b] = b, a
        if len(self.nb[c][u]) == 2:
            end[u] = -1
        if len(self.nb[c][v]) == 2:
            end[v] = -1
        self.colour[canon(u, v)] = c

    def _walk(self, c: int, start: int, prev: int) -> int:
        nb = self.nb[c]
        cur = start
        while True:
            nxt = -1
            for w in nb[cur]:
                if w != prev:
                    nxt = w
                    break
            if nxt < 0:
                return cur
            prev, cur = cur, nxt

    def remove(self, u: int, v: int) -> int:
        e = canon(u, v)
        c = self.colour.pop(e)
        nb = self.nb[c]
        nb[u].remove(v)
        nb[v].remove(u)
        end = self.end[c]
        p = self._walk(c, u, -1) if len(nb[u]) == 1 else u
        q = self._walk(c, v, -1) if len(nb[v]) == 1 else v
        end[u], end[p] = p, u
        end[v], end[q] = q, v
        return c

    def path_edge_near(self, c: int, u: int, v: int, rng: random.Random, locked) -> Edge | None:
        """An evictable edge on the u..v path in colour c (u, v its endpoints)."""
        nb = self.nb[c]
        cands = []
        for x in (u, v):
            if nb[x]:
                e = canon(x, nb[x][0])
                if e not in locked:
                    cands.append(e)
        if cands:
            return rng.choice(cands)
        prev, cur = -1, u
        while cur != v:
            nxt = [w for w in nb[cur] if w != prev][0]
            e = canon(cur, nxt)
            if e not in locked:
                return e
            prev, cur = cur, nxt
        return None

    def classes(self) -> list[list[Edge]]:
        out: list[list[Edge]] = [[] for _ in range(self.k)]
        for e, c in self.colour.items():
            out[c].append(e)
        for lst in out:
            lst.sort()
        return out


def partition_into_linear_forests(
    n: int,
    edges: Sequence[Edge],
    k: int,
    *,
    initial: dict[Edge, int] | None = None,
    locked: Iterable[Edge] = (),
    seed: int = 0,
    max_steps: int = 200_000,
    tenure: int = 10,
    noise: float = 0.02,
) -> tuple[list[list[Edge]] | None, SearchStats]:
    """Try to split ``edges`` into ``k`` linear forests.

    ``initial`` pre-assigns colours (entries that conflict are queued instead);
    ``locked`` edges must be in ``initial`` and are never evicted.
    Returns ``(classes, stats)``; classes is None when the step budget runs out.
    """
    rng = random.Random(seed)
    stats = SearchStats()
    edges = [canon(u, v) for u, v in edges]
    locked = {canon(u, v) for u, v in locked}
    if k <= 0:
        stats.solved = not edges
        return ([] if not edges else None), stats
    st = ForestState(n, k)
    queue: list[Edge] = []
    initial = initial or {}
    for e in sorted(edges, key=lambda e: (e not in locked, e)):
        c = initial.get(e)
        if c is not None and 0 <= c < k and st.can_insert(c, *e):
            st.insert(c, *e)
        elif e in locked:
            raise ValueError(f"locked edge {e} has no consistent initial colour")
        else:
            queue.append(e)
    rng.shuffle(queue)
    tabu: dict[tuple[Edge, int], int] = {}
    colours = list(range(k))

    while queue:
        if stats.steps >= max_steps:
            return None, stats
        stats.steps += 1
        step = stats.steps
        u, v = e = queue.pop()
        best_cost, best = None, []
        for c in colours:
            if tabu.get((e, c), -1) > step:
                continue
            cost = _insertion_cost(st, c, u, v, locked)
            if cost is None:
                continue
            if best_cost is None or cost < best_cost:
                best_cost, best = cost, [c]
            elif cost == best_cost:
                best.append(c)
            if cost == 0 and len(best) > 2:
                break
        if not best or (noise and rng.random() < noise):
            allowed = [c for c in colours if _insertion_cost(st, c, u, v, locked) is not None]
            if not allowed:
                queue.insert(0, e)
                continue
            best = allowed
        c = rng.choice(best)
        evicted = _make_room(st, c, u, v, locked, rng)
        if evicted is None:
            queue.insert(0, e)
            continue
        for f in evicted:
            tabu[(f, c)] = step + tenure
            queue.append(f)
        stats.evictions += len(evicted)
        st.insert(c, u, v)
        if len(queue) > 1 and rng.random() < 0.5:
            i = rng.randrange(len(queue))
            queue[i], queue[-1] = queue[-1], queue[i]
    stats.solved = True
    return st.classes(), stats


def _insertion_cost(st: ForestState, c: int, u: int, v: int, locked: set) -> int | None:
    nb = st.nb[c]
    cost = 0
    for x in (u, v):
        if len(nb[x]) == 2:
            if all(canon(x, y) in locked for y in nb[x]):
                return None
            cost += 1
    if cost == 0 and st.end[c][u] == v:
        cost = 1
    return cost


def _make_room(st: ForestState, c: int, u: int, v: int, locked: set, rng: random.Random) -> list[Edge] | None:
    out: list[Edge] = []
    for x in (u, v):
        nb = st.nb[c][x]
        if len(nb) == 2:
            opts = [canon(x, y) for y in nb if canon(x, y) not in locked]
            if not opts:
                _restore(st, c, out)
                return None
            f = rng.choice(opts)
            st.remove(*f)
            out.append(f)
    if st.end[c][u] == v:
        f = st.path_edge_near(c, u, v, rng, locked)
        if f is None:
            _restore(st, c, out)
            return None
        st.remove(*f)
        out.append(f)
    return out


def _restore(st: ForestState, c: int, removed: list[Edge]) -> None:
    for f in removed:
        st.insert(c, *f)
