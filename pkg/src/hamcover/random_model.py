"""Seeded G(n, p) sampling and empirical checkers for random-graph properties.

Natural logarithms throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.sparse as sp

from .errors import ModeUnavailable, PreconditionViolated
from .graph import Graph, canon

EXACT_LIMIT = 14
_CHUNK = 1 << 20


@dataclass(frozen=True)
class SampleSpec:
    n: int
    p: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")


def _pairs_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the lexicographic rank of (u, v), u < v."""
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2).astype(np.int64)
    off = u * (2 * n - u - 1) // 2
    # float rounding can land one row off either way
    too_far = off > idx
    u[too_far] -= 1
    off = u * (2 * n - u - 1) // 2
    nxt = (u + 1) * (2 * n - u - 2) // 2
    short = nxt <= idx
    u[short] += 1
    off = u * (2 * n - u - 1) // 2
    v = idx - off + u + 1
    return u, v


def sample_gnp(spec: SampleSpec) -> Graph:
    """Sample G(n, p) from a PCG64 stream seeded by ``spec.seed``.

    Pairs are visited in lexicographic order; the gap to the next present edge
    is drawn geometrically, which is equivalent to one Bernoulli(p) per pair.
    """
    n, p = spec.n, spec.p
    total = n * (n - 1) // 2
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    dtype = np.int32 if n < 2**31 else np.int64
    chunks_u, chunks_v = [], []
    last = -1
    chunk = int(min(_CHUNK, total * p + 6 * math.sqrt(total * p) + 16))
    while True:
        gaps = rng.geometric(p, size=chunk)
        idx = last + np.cumsum(gaps, dtype=np.int64)
        cut = np.searchsorted(idx, total)
        idx = idx[:cut]
        if idx.size:
            u, v = _pairs_from_index(idx, n)
            chunks_u.append(u.astype(dtype))
            chunks_v.append(v.astype(dtype))
            last = int(idx[-1])
        if cut < chunk:
            break
    if chunks_u:
        edges = np.column_stack([np.concatenate(chunks_u), np.concatenate(chunks_v)])
    else:
        edges = np.zeros((0, 2), dtype=dtype)
    return Graph._from_sorted(n, edges)


@dataclass(frozen=True)
class TailBoundInput:
    n: int
    p: float
    h: float


def binomial_tail_bound(inp: TailBoundInput) -> float:
    """Upper bound on P(Bin(n, p) >= pn + h), valid when pn >= 1 and hqn >= 3."""
    n, p, h = inp.n, inp.p, inp.h
    q = 1.0 - p
    if not 0.0 < p < 1.0:
        raise PreconditionViolated("p must lie in (0, 1)", "p")
    if p * n < 1:
        raise PreconditionViolated("requires pn >= 1", "pn")
    if h * q * n < 3:
        raise PreconditionViolated("requires h*q*n >= 3", "hqn")
    pqn = p * q * n
    expo = -h * h / (2 * pqn) + h / pqn + h**3 / (p * p * n * n)
    return math.sqrt(pqn / (2 * h * h * math.pi)) * math.exp(expo)


@dataclass
class PropertyReport:
    property: str
    verdict: Literal["holds", "violated", "inconclusive"]
    witness: object = None
    stats: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "property": self.property,
            "stats": self.stats,
            "verdict": self.verdict,
            "witness": _jsonable(self.witness),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def log_spread(n: int, p: float) -> float:
    """sqrt(2 p n ln n), the scale of degree deviations in G(n, p)."""
    return math.sqrt(2 * p * n * math.log(n)) if n > 1 else 0.0


@dataclass(frozen=True)
class HighDegreeSet:
    vertices: frozenset[int]
    threshold: float
    size_bound: float

    def __len__(self) -> int:
        return len(self.vertices)


def high_degree_set(g: Graph, p: float, alpha: float, exponent: float = 0.1) -> HighDegreeSet:
    """Vertices of degree >= pn + (1 - alpha) sqrt(2 pn ln n).

    ``size_bound`` is n**exponent, the size the set is expected to stay under.
    """
    n = g.n
    thr = p * n + (1 - alpha) * log_spread(n, p)
    verts = np.flatnonzero(g.degrees >= thr - 1e-9)
    return HighDegreeSet(frozenset(int(v) for v in verts), thr, n**exponent)


def high_degree_report(g: Graph, p: float, alpha: float, exponent: float = 0.1) -> PropertyReport:
    hd = high_degree_set(g, p, alpha, exponent)
    ok = len(hd) <= hd.size_bound
    return PropertyReport(
        "high_degree_set",
        "holds" if ok else "violated",
        None if ok else sorted(hd.vertices),
        {"size": len(hd), "threshold": hd.threshold, "size_bound": hd.size_bound,
         "vertices": sorted(hd.vertices)},
        {"p": p, "alpha": alpha, "exponent": exponent, "n": g.n},
    )


def in_degree_regime(n: int, p: float) -> bool:
    """p >= 100 ln n / n. The companion cap p <= n^-1/2 is only reported:
    it leaves no admissible p below n of about 10^7."""
    if n < 3 or not 0 < p < 1:
        return False
    return p >= 100 * math.log(n) / n * (1 - 1e-12)


def check_degree_window(g: Graph, p: float, c_low: float = 0.8) -> PropertyReport:
    """Max/min degree against pn +- 2 sqrt(2pn ln n).

    The lower bound on the maximum degree uses ``c_low`` in place of an
    unquantified 1 - o(1); it is reported under ``stats`` and does not affect
    the verdict.
    """
    n = g.n
    params = {"p": p, "c_low": c_low, "n": n}
    if not in_degree_regime(n, p):
        return PropertyReport("degree_window", "inconclusive",
                              stats={"reason": "p below 100 ln n / n"}, params=params)
    spread = log_spread(n, p)
    upper = p * n + 2 * spread
    lower = p * n - 2 * spread
    dmax, dmin = g.max_degree, g.min_degree
    stats = {
        "max_degree": dmax,
        "min_degree": dmin,
        "max_upper_bound": upper,
        "min_lower_bound": lower,
        "max_lower_bound_c_low": p * n + c_low * spread,
        "max_lower_bound_c_low_ok": bool(dmax >= p * n + c_low * spread),
        "p_above_n_pow_minus_half": bool(p > n ** -0.5),
    }
    witness = []
    if dmax > upper:
        witness += [int(v) for v in np.flatnonzero(g.degrees > upper)]
    if dmin < lower:
        witness += [int(v) for v in np.flatnonzero(g.degrees < lower)]
    verdict = "violated" if witness else "holds"
    return PropertyReport("degree_window", verdict, witness or None, stats, params)


@dataclass(frozen=True)
class ExpansionParams:
    """Set-size cap ``s``, expansion factor ``d``, deletion fraction ``alpha``."""

    s: int
    d: float
    alpha: float

    def __post_init__(self):
        # d >= 1 (not 3): small exact cases need it
        if self.s < 1 or self.d < 1:
            raise ValueError("need s >= 1 and d >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


def deletion_caps(g: Graph, alpha: float) -> np.ndarray:
    return np.floor(alpha * g.degrees + 1e-9).astype(np.int64)


def worst_case_neighbourhood(g: Graph, xs: tuple[int, ...], alpha: float) -> tuple[int, list]:
    """Exact minimum of |N_{G-F}(X)| over admissible deletions F.

    A neighbour y leaves the neighbourhood only if every edge from X to y is
    deleted, so the optimum removes a largest set Y of neighbours whose edge
    demands fit the per-vertex caps. Returns the size and a witness F.
    """
    adj = g.adj
    xset = set(xs)
    caps = {x: int(math.floor(alpha * len(adj[x]) + 1e-9)) for x in xs}
    nbhd = sorted({y for x in xs for y in adj[x]} - xset)
    need = {y: [x for x in xs if y in adj[x]] for y in nbhd}
    cand = sorted((y for y in nbhd if all(caps[x] > 0 for x in need[y])),
                  key=lambda y: (len(need[y]), y))
    best: list[int] = []
    chosen: list[int] = []
    left = dict(caps)

    def dfs(i: int) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (len(cand) - i) <= len(best):
            return
        # every removed neighbour costs at least one unit of cap
        if len(chosen) + sum(left.values()) <= len(best):
            return
        for j in range(i, len(cand)):
            y = cand[j]
            if all(left[x] > 0 for x in need[y]):
                for x in need[y]:
                    left[x] -= 1
                chosen.append(y)
                dfs(j + 1)
                chosen.pop()
                for x in need[y]:
                    left[x] += 1
            if len(chosen) + (len(cand) - j - 1) <= len(best):
                return

    dfs(0)
    witness_f = sorted(canon(x, y) for y in best for x in need[y])
    return len(nbhd) - len(best), witness_f


def neighbourhood_after_deletion(g: Graph, xs, deleted) -> set[int]:
    """Replay: N_{G-F}(X) computed straight from the definition."""
    dset = {canon(u, v) for u, v in deleted}
    xset = set(xs)
    return {y for x in xs for y in g.adj[x] if y not in xset and canon(x, y) not in dset}


def deletion_is_admissible(g: Graph, xs, deleted, alpha: float) -> bool:
    dset = {canon(u, v) for u, v in deleted}
    for x in xs:
        used = sum(1 for e in dset if x in e)
        if used > alpha * g.degree(x) + 1e-9:
            return False
    return True


def _csr(g: Graph) -> sp.csr_matrix:
    n = g.n
    if g.m == 0:
        return sp.csr_matrix((n, n), dtype=np.int32)
    u = g.edges[:, 0].astype(np.int64)
    v = g.edges[:, 1].astype(np.int64)
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    data = np.ones(rows.size, dtype=np.int32)
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def _greedy_deletion(indptr, indices, degs, xs: np.ndarray, alpha: float, rng) -> tuple[int, list]:
    """Each member of X deletes its cap of edges towards its most private neighbours."""
    xs_list = xs.tolist()
    owners, targets = [], []
    for x in xs_list:
        nb = indices[indptr[x]:indptr[x + 1]]
        owners.append(np.full(nb.size, x))
        targets.append(nb)
    own = np.concatenate(owners)
    tgt = np.concatenate(targets)
    outside = ~np.isin(tgt, xs)
    own, tgt = own[outside], tgt[outside]
    if tgt.size == 0:
        return 0, []
    uniq, inv, mult = np.unique(tgt, return_inverse=True, return_counts=True)
    caps = np.floor(alpha * degs[own] + 1e-9).astype(np.int64)
    # sort each owner's targets by multiplicity (private first), random tie-break
    order = np.lexsort((rng.random(tgt.size), mult[inv], own))
    own_s, inv_s = own[order], inv[order]
    starts = np.r_[0, np.flatnonzero(np.diff(own_s)) + 1]
    rank = np.arange(own_s.size) - np.repeat(starts, np.diff(np.r_[starts, own_s.size]))
    deleted = rank < caps[order]
    removed_count = np.bincount(inv_s[deleted], minlength=uniq.size)
    gone = removed_count == mult
    size = int(uniq.size - gone.sum())
    del_pairs = [canon(int(a), int(b)) for a, b in zip(own_s[deleted], uniq[inv_s[deleted]])]
    return size, del_pairs


def check_expansion(g: Graph, params: ExpansionParams, mode: str = "sampled",
                    budget: int = 1000, seed: int = 0) -> PropertyReport:
    """Search for X, F violating |N_{G-F}(X)| >= 2d|X|.

    ``exact`` enumerates every X with |X| <= s and the worst admissible F
    (n <= 14 only). ``sampled`` draws ``budget`` random sets X and deletes
    adversarially-greedy F for each.
    """
    n = g.n
    s = min(params.s, n)
    d, alpha = params.d, params.alpha
    pj = {"s": params.s, "d": d, "alpha": alpha, "mode": mode, "budget": budget, "seed": seed}
    if mode == "exact":
        if n > EXACT_LIMIT:
            raise ModeUnavailable(f"exact expansion check needs n <= {EXACT_LIMIT}")
        checked = 0
        for k in range(1, s + 1):
            for xs in itertools.combinations(range(n), k):
                checked += 1
                size, f = worst_case_neighbourhood(g, xs, alpha)
                if size < 2 * d * k:
                    return PropertyReport("expansion", "violated",
                                          {"X": list(xs), "F": [list(e) for e in f]},
                                          {"sets_checked": checked, "neighbourhood": size}, pj)
        return PropertyReport("expansion", "holds", None, {"sets_checked": checked}, pj)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    a = _csr(g)
    degs = g.degrees
    caps_all = np.floor(alpha * degs + 1e-9).astype(np.int64)
    worst_ratio = math.inf
    skipped = 0
    for it in range(budget):
        k = int(rng.integers(1, s + 1))
        xs = np.sort(rng.choice(n, size=k, replace=False))
        nb = np.unique(a.indices[np.concatenate([np.arange(a.indptr[x], a.indptr[x + 1]) for x in xs])]) \
            if k else np.zeros(0, dtype=np.int64)
        nb = np.setdiff1d(nb, xs, assume_unique=True)
        need = 2 * d * k
        if nb.size - int(caps_all[xs].sum()) >= need:
            skipped += 1
            worst_ratio = min(worst_ratio, (nb.size - int(caps_all[xs].sum())) / need)
            continue
        size, f = _greedy_deletion(a.indptr, a.indices, degs, xs, alpha, rng)
        worst_ratio = min(worst_ratio, size / need)
        if size < need:
            return PropertyReport("expansion", "violated",
                                  {"X": xs.tolist(), "F": [list(e) for e in f]},
                                  {"samples": it + 1, "neighbourhood": size}, pj)
    return PropertyReport("expansion", "holds", None,
                          {"samples": budget, "pruned_by_cap_bound": skipped,
                           "min_ratio_seen": None if worst_ratio == math.inf else worst_ratio}, pj)


def cross_edges(g: Graph, a_set, b_set) -> int:
    b = set(b_set)
    return sum(1 for x in a_set for y in g.adj[x] if y in b)


def check_cross_edges(g: Graph, size_a: int, size_b: int, min_edges: int,
                      mode: str = "sampled", budget: int = 1000, seed: int = 0) -> PropertyReport:
    """Search for disjoint A, B of the given sizes with e(A, B) < min_edges.

    For a fixed A the worst B is the ``size_b`` outside vertices with fewest
    neighbours in A, so only A is enumerated (exact) or sampled.
    """
    n = g.n
    pj = {"size_a": size_a, "size_b": size_b, "min_edges": min_edges,
          "mode": mode, "budget": budget, "seed": seed}
    if size_a + size_b > n or size_a < 1 or size_b < 1:
        return PropertyReport("cross_edges", "inconclusive",
                              stats={"reason": "sizes do not fit in the vertex set"}, params=pj)
    a = _csr(g)

    def worst_b(ind: np.ndarray):
        cnt = np.asarray(a @ ind).ravel().astype(np.int64)
        cnt[ind > 0] = np.iinfo(np.int64).max
        pick = np.argsort(cnt, kind="stable")[:size_b]
        return pick, int(cnt[pick].sum())

    if mode == "exact":
        if n > EXACT_LIMIT:
            raise ModeUnavailable(f"exact cross-edge check needs n <= {EXACT_LIMIT}")
        checked = 0
        for aset in itertools.combinations(range(n), size_a):
            checked += 1
            ind = np.zeros(n, dtype=np.int64)
            ind[list(aset)] = 1
            pick, e = worst_b(ind)
            if e < min_edges:
                return PropertyReport("cross_edges", "violated",
                                      {"A": list(aset), "B": sorted(pick.tolist())},
                                      {"sets_checked": checked, "edges": e}, pj)
        return PropertyReport("cross_edges", "holds", None, {"sets_checked": checked}, pj)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    fewest = None
    for it in range(budget):
        aset = rng.choice(n, size=size_a, replace=False)
        ind = np.zeros(n, dtype=np.int64)
        ind[aset] = 1
        pick, e = worst_b(ind)
        fewest = e if fewest is None else min(fewest, e)
        if e < min_edges:
            return PropertyReport("cross_edges", "violated",
                                  {"A": sorted(aset.tolist()), "B": sorted(pick.tolist())},
                                  {"samples": it + 1, "edges": e}, pj)
    return PropertyReport("cross_edges", "holds", None, {"samples": budget, "fewest_edges_seen": fewest}, pj)
