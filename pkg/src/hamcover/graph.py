"""Core value types: graphs, linear forests, Hamilton cycles, cover certificates.

Vertices are dense integers ``0..n-1``; edges are canonical ``(min, max)`` pairs.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateEdge, SelfLoop, VertexOutOfRange

Edge = tuple[int, int]


def canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph.

    ``edges`` is an ``(m, 2)`` integer array of canonical pairs sorted
    lexicographically. Adjacency structures are derived lazily, so a very large
    sample can be held as its edge array alone.
    """

    n: int
    edges: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "Graph":
        """Trusted constructor: canonicalizes and deduplicates, no range checks."""
        pairs = {canon(int(u), int(v)) for u, v in edges}
        arr = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
        return cls._from_sorted(n, arr)

    @classmethod
    def _from_sorted(cls, n: int, arr: np.ndarray) -> "Graph":
        arr.setflags(write=False)
        return cls(n, arr)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        if self.m == 0:
            return np.zeros(self.n, dtype=np.int64)
        return np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges.tolist():
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(frozenset(x) for x in nbrs)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(map(tuple, self.edges.tolist()))

    def edge_list(self) -> list[Edge]:
        return [tuple(e) for e in self.edges.tolist()]

    def has_edge(self, u: int, v: int) -> bool:
        return canon(u, v) in self.edge_set

    def digest(self) -> str:
        """sha256 over the sorted edge list, prefixed by n."""
        h = hashlib.sha256(f"{self.n}\n".encode())
        h.update(np.ascontiguousarray(self.edges, dtype="<i8").tobytes())
        return h.hexdigest()

    def with_edges(self, extra: Iterable[Edge]) -> "Graph":
        return Graph.from_edges(self.n, self.edge_set | {canon(u, v) for u, v in extra})

    def without_edges(self, removed: Iterable[Edge]) -> "Graph":
        drop = {canon(u, v) for u, v in removed}
        return Graph.from_edges(self.n, (e for e in self.edge_set if e not in drop))

    def induced_edges(self, vertices: Iterable[int]) -> list[Edge]:
        keep = set(vertices)
        return [e for e in self.edge_list() if e[0] in keep and e[1] in keep]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.digest()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    """Validate and build a graph; malformed input is rejected, never repaired."""
    if n < 1:
        raise ValueError("n must be at least 1")
    seen: set[Edge] = set()
    for e in edge_list:
        u, v = int(e[0]), int(e[1])
        for w in (u, v):
            if not 0 <= w < n:
                raise VertexOutOfRange(w, n)
        if u == v:
            raise SelfLoop(u)
        c = canon(u, v)
        if c in seen:
            raise DuplicateEdge(*c)
        seen.add(c)
    return Graph.from_edges(n, seen)


@dataclass(frozen=True)
class DegreeStats:
    max_degree: int
    min_degree: int
    histogram: dict[int, int]

    def to_json(self) -> dict:
        return {
            "max_degree": self.max_degree,
            "min_degree": self.min_degree,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def degree_stats(g: Graph) -> DegreeStats:
    values, counts = np.unique(g.degrees, return_counts=True)
    hist = {int(d): int(c) for d, c in zip(values, counts)}
    return DegreeStats(g.max_degree, g.min_degree, hist)


@dataclass(frozen=True)
class Cherry:
    center: int
    leaves: tuple[int, int]

    def __post_init__(self):
        a, b = self.leaves
        if a == b or self.center in self.leaves:
            raise ValueError(f"degenerate cherry {self}")

    @property
    def edges(self) -> list[Edge]:
        return [canon(self.center, x) for x in self.leaves]

    @property
    def vertices(self) -> tuple[int, int, int]:
        return (self.leaves[0], self.center, self.leaves[1])


@dataclass(frozen=True)
class LinearForest:
    """Vertex-disjoint paths. A one-vertex path marks a vertex as covered."""

    paths: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        seen: set[int] = set()
        for p in self.paths:
            if not p:
                raise ValueError("empty path")
            for v in p:
                if v in seen:
                    raise ValueError(f"vertex {v} repeated in linear forest")
                seen.add(v)

    @classmethod
    def from_paths(cls, paths: Iterable[Sequence[int]], host: Graph | None = None) -> "LinearForest":
        f = cls(tuple(tuple(int(v) for v in p) for p in paths))
        if host is not None:
            missing = [e for e in f.edges if e not in host.edge_set]
            if missing:
                raise ValueError(f"forest uses non-edges {missing[:3]}")
        return f

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], vertices: Iterable[int] = ()) -> "LinearForest":
        """Assemble paths from an edge set; raises ValueError if it is not linear."""
        nb: dict[int, list[int]] = {}
        for u, v in edges:
            nb.setdefault(u, []).append(v)
            nb.setdefault(v, []).append(u)
        if any(len(x) > 2 for x in nb.values()):
            raise ValueError("vertex of degree > 2")
        paths: list[tuple[int, ...]] = []
        done: set[int] = set()
        for s in sorted(nb):
            if s in done or len(nb[s]) != 1:
                continue
            path = [s]
            done.add(s)
            prev, cur = -1, s
            while True:
                nxt = [w for w in nb[cur] if w != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                path.append(cur)
                done.add(cur)
            paths.append(tuple(path))
        if len(done) != len(nb):
            raise ValueError("edge set contains a cycle")
        for v in sorted(set(vertices)):
            if v not in done:
                paths.append((v,))
                done.add(v)
        return cls(tuple(paths))

    @cached_property
    def edges(self) -> frozenset[Edge]:
        return frozenset(canon(p[i], p[i + 1]) for p in self.paths for i in range(len(p) - 1))

    @cached_property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for p in self.paths for v in p)

    @property
    def endpoints(self) -> list[tuple[int, int]]:
        return [(p[0], p[-1]) for p in self.paths]

    @property
    def num_components(self) -> int:
        return len(self.paths)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.paths]


@dataclass(frozen=True)
class HamiltonCycle:
    order: tuple[int, ...]

    @classmethod
    def of(cls, order: Iterable[int]) -> "HamiltonCycle":
        return cls(tuple(int(v) for v in order))

    @cached_property
    def edges(self) -> frozenset[Edge]:
        o = self.order
        k = len(o)
        if k < 2:
            return frozenset()
        return frozenset(canon(o[i], o[(i + 1) % k]) for i in range(k))

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    reason: str = "ok"

    def __bool__(self) -> bool:
        return self.ok


def verify_hamilton_cycle(g: Graph, c: HamiltonCycle | Sequence[int]) -> CheckResult:
    order = c.order if isinstance(c, HamiltonCycle) else tuple(c)
    n = g.n
    if len(order) != n:
        return CheckResult(False, "wrong-length")
    if any(not (0 <= v < n) for v in order):
        return CheckResult(False, "vertex-out-of-range")
    if len(set(order)) != n:
        return CheckResult(False, "repeated-vertex")
    if n < 3:
        return CheckResult(False, "too-small")
    es = g.edge_set
    for i in range(n):
        if canon(order[i], order[(i + 1) % n]) not in es:
            return CheckResult(False, "non-edge")
    return CheckResult(True)


def cover_target(g: Graph) -> int:
    return math.ceil(g.max_degree / 2)


@dataclass(frozen=True)
class CoverCertificate:
    cycles: tuple[HamiltonCycle, ...]
    target_count: int
    graph_hash: str

    @classmethod
    def for_graph(cls, g: Graph, cycles: Iterable[HamiltonCycle]) -> "CoverCertificate":
        return cls(tuple(cycles), cover_target(g), g.digest())

    def to_json(self, n: int) -> dict:
        return {
            "n": n,
            "graph_hash": self.graph_hash,
            "cycles": [list(c.order) for c in self.cycles],
        }

    @classmethod
    def from_json(cls, data: dict, target_count: int = -1) -> "CoverCertificate":
        cycles = tuple(HamiltonCycle.of(c) for c in data["cycles"])
        return cls(cycles, target_count, str(data["graph_hash"]))


@dataclass
class VerificationReport:
    valid: bool
    optimal: bool
    count: int
    target: int
    invalid_cycles: list[tuple[int, str]] = field(default_factory=list)
    uncovered_edges: list[Edge] = field(default_factory=list)
    hash_matches: bool = True

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "hash_matches": self.hash_matches,
            "invalid_cycles": [[i, r] for i, r in self.invalid_cycles],
            "optimal": self.optimal,
            "target": self.target,
            "uncovered_edges": [list(e) for e in self.uncovered_edges],
            "valid": self.valid,
        }


def verify_cover(g: Graph, cert: CoverCertificate) -> VerificationReport:
    """Check every cycle and the edge union; never raises on semantic defects."""
    target = cover_target(g)
    bad = []
    union: set[Edge] = set()
    for i, c in enumerate(cert.cycles):
        res = verify_hamilton_cycle(g, c)
        if not res:
            bad.append((i, res.reason))
        else:
            union |= c.edges
    uncovered = sorted(g.edge_set - union)
    hash_ok = cert.graph_hash == g.digest()
    valid = not bad and not uncovered and hash_ok
    count = len(cert.cycles)
    # each Hamilton cycle uses exactly two edges at every vertex
    assert not valid or count >= target, "cover beats the degree lower bound"
    return VerificationReport(valid, valid and count == target, count, target, bad, uncovered, hash_ok)


def is_linear_forest(edge_set: Iterable[Edge], n: int) -> bool:
    """True iff the edges form vertex-disjoint simple paths on ``0..n-1``."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    deg = Counter()
    seen: set[Edge] = set()
    for u, v in edge_set:
        if u == v or not (0 <= u < n and 0 <= v < n):
            return False
        e = canon(u, v)
        if e in seen:
            return False
        seen.add(e)
        deg[u] += 1
        deg[v] += 1
        if deg[u] > 2 or deg[v] > 2:
            return False
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True
