"""Maximum bipartite matching (Hopcroft-Karp) and edge-colouring primitives."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .graph import Edge, canon

_INF = float("inf")


def hopcroft_karp(left_adj: Sequence[Sequence[int]], n_right: int) -> tuple[list[int], list[int]]:
    """Maximum matching between left vertices ``0..L-1`` and right ``0..R-1``.

    Returns ``(match_left, match_right)`` with -1 for unmatched vertices.
    """
    n_left = len(left_adj)
    ml = [-1] * n_left
    mr = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if ml[u] < 0:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = _INF
        found = False
        while q:
            u = q.popleft()
            for v in left_adj[u]:
                w = mr[v]
                if w < 0:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(root: int) -> bool:
        # iterative augmenting-path search along the BFS layering
        stack = [(root, iter(left_adj[root]))]
        trail: list[tuple[int, int]] = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = mr[v]
                if w < 0:
                    trail.append((u, v))
                    for a, b in trail:
                        ml[a] = b
                        mr[b] = a
                    return True
                if dist[w] == dist[u] + 1:
                    trail.append((u, v))
                    stack.append((w, iter(left_adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = _INF
                stack.pop()
                if trail:
                    trail.pop()
        return False

    while bfs():
        for u in range(n_left):
            if ml[u] < 0:
                dfs(u)
    return ml, mr


def greedy_edge_coloring(edges: Iterable[Edge], degree: dict[int, int] | None = None) -> dict[Edge, int]:
    """Proper edge colouring, smallest free colour first (at most 2*Delta - 1 colours).

    Edges are processed by decreasing larger-endpoint degree, then lexicographically.
    """
    edges = [canon(u, v) for u, v in edges]
    if degree is None:
        degree = {}
        for u, v in edges:
            degree[u] = degree.get(u, 0) + 1
            degree[v] = degree.get(v, 0) + 1
    edges.sort(key=lambda e: (-max(degree[e[0]], degree[e[1]]), e))
    used: dict[int, set[int]] = {}
    out: dict[Edge, int] = {}
    for u, v in edges:
        cu, cv = used.setdefault(u, set()), used.setdefault(v, set())
        c = 0
        while c in cu or c in cv:
            c += 1
        out[(u, v)] = c
        cu.add(c)
        cv.add(c)
    return out


def bipartite_edge_coloring(edges: Iterable[Edge], max_degree: int | None = None) -> dict[Edge, int]:
    """Colour a bipartite graph's edges with exactly Delta colours.

    Each edge takes a colour free at both ends, after swapping two colours
    along an alternating path when needed; bipartiteness guarantees the path
    never returns to the other endpoint.
    """
    edges = sorted(canon(u, v) for u, v in edges)
    if max_degree is None:
        deg: dict[int, int] = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        max_degree = max(deg.values(), default=0)
    at: dict[int, dict[int, int]] = {}

    def free(x: int) -> int:
        m = at.setdefault(x, {})
        for c in range(max_degree):
            if c not in m:
                return c
        raise AssertionError("no free colour; degree exceeds max_degree")

    for u, v in edges:
        a = free(u)
        b = free(v)
        if a not in at[v]:
            c = a
        else:
            # swap a/b along the path from v that starts with colour a
            path = []
            x, col = v, a
            while col in at[x]:
                y = at[x][col]
                path.append((x, y, col))
                x, col = y, (b if col == a else a)
            for x, y, col in path:
                del at[x][col]
                del at[y][col]
            for x, y, col in path:
                new = b if col == a else a
                at[x][new] = y
                at[y][new] = x
            assert a not in at[v] and u not in (p[1] for p in path)
            c = a
        at[u][c] = v
        at[v][c] = u
    out: dict[Edge, int] = {}
    for x, m in at.items():
        for c, y in m.items():
            out[canon(x, y)] = c
    return out


def misra_gries_coloring(edges: Iterable[Edge]) -> dict[Edge, int]:
    """Proper edge colouring of a simple graph with at most Delta + 1 colours."""
    edges = sorted(canon(u, v) for u, v in edges)
    deg: dict[int, int] = {}
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    ncol = max(deg.values(), default=0) + 1
    at: dict[int, dict[int, int]] = {x: {} for x in deg}
    col: dict[Edge, int] = {}

    def is_free(x: int, c: int) -> bool:
        return c not in at[x]

    def first_free(x: int) -> int:
        m = at[x]
        for c in range(ncol):
            if c not in m:
                return c
        raise AssertionError("vertex saturated")

    def set_col(x: int, y: int, c: int) -> None:
        e = canon(x, y)
        old = col.get(e)
        if old is not None:
            del at[x][old]
            del at[y][old]
        col[e] = c
        at[x][c] = y
        at[y][c] = x

    def clear(x: int, y: int) -> None:
        e = canon(x, y)
        c = col.pop(e)
        del at[x][c]
        del at[y][c]

    def fan_ok(f: list[int]) -> bool:
        # f[0] uncoloured at u; colour of (u, f[i+1]) free on f[i]
        if canon(u, f[0]) in col:
            return False
        for i in range(len(f) - 1):
            k = col.get(canon(u, f[i + 1]))
            if k is None or k in at[f[i]]:
                return False
        return True

    for u, v0 in edges:
        # maximal fan of u starting at v0
        fan = [v0]
        in_fan = {v0}
        grown = True
        while grown:
            grown = False
            last = fan[-1]
            for c, w in at[u].items():
                if w not in in_fan and is_free(last, c):
                    fan.append(w)
                    in_fan.add(w)
                    grown = True
                    break
        c = first_free(u)
        d = first_free(fan[-1])
        # invert the cd-path through u
        if not is_free(u, d):
            path = []
            x, cur = u, d
            while cur in at[x]:
                y = at[x][cur]
                path.append((x, y))
                x, cur = y, (c if cur == d else d)
            cols = [col[canon(x, y)] for x, y in path]
            for x, y in path:
                clear(x, y)
            for (x, y), k in zip(path, cols):
                set_col(x, y, c if k == d else d)
        # first fan vertex w with d free such that fan[:w] is still a fan
        w_idx = None
        for i, w in enumerate(fan):
            if is_free(w, d):
                if i == 0 or fan_ok(fan[: i + 1]):
                    w_idx = i
                    break
        assert w_idx is not None
        # rotate the fan prefix
        for i in range(w_idx):
            a, b = fan[i], fan[i + 1]
            k = col[canon(u, b)]
            clear(u, b)
            if canon(u, a) in col:
                clear(u, a)
            set_col(u, a, k)
        if canon(u, fan[w_idx]) in col:
            clear(u, fan[w_idx])
        set_col(u, fan[w_idx], d)
    return col


def is_proper_coloring(coloring: dict[Edge, int]) -> bool:
    seen: set[tuple[int, int]] = set()
    for (u, v), c in coloring.items():
        if (u, c) in seen or (v, c) in seen:
            return False
        seen.add((u, c))
        seen.add((v, c))
    return True
