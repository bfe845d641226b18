"""End-to-end Hamilton cover: pack, split the leftover into linear forests,
extend each forest to a Hamilton cycle.

Two routes produce the forests. The ``staged`` route follows the constructive
proof (reservoir split, approximate arboricity per piece, exact forests at the
high-degree core, merge). At laptop sizes its forest budget is usually too
tight, so the ``auto`` route falls back to the ``direct`` route: a local
search that splits the leftover into exactly ceil(Delta(L)/2) linear forests
with the core's edges seeded from the exact construction.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, milp

from .errors import (
    BudgetExceeded,
    DecompositionFailed,
    MergeInfeasible,
    PhaseFailure,
    PreconditionViolated,
    SearchFailed,
    TooLarge,
)
from .forest_search import partition_into_linear_forests
from .forests import (
    Bipartition,
    ForestCollection,
    approx_linear_arboricity,
    decompose_with_core,
    merge_edges_into_forests,
)
from .graph import CoverCertificate, Edge, Graph, HamiltonCycle, LinearForest, cover_target, verify_cover
from .hamilton import (
    PackingResult,
    extend_directly,
    extend_forest_to_hamilton,
    make_extension_plan,
    pack_hamilton_cycles,
)
from .random_model import log_spread
from .seeding import derive_seed

CONFIG_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    profile: str = "desk"
    t: int = 10
    alpha: float = 0.05
    prop_alpha: float = 0.01
    eps_arb: float = 0.1
    rho_v: float = 0.05
    rho_d: float = 0.01
    core_ratio: float = 0.25
    c_merge: float = 0.2
    high_fraction: float = 0.25
    # desk multiplier on the piece max-degree bound of the reservoir split
    piece_slack: float = 2.0
    bad_ratio: float = 0.25
    route: str = "auto"
    pack_retries: int = 20
    pack_rollback: int = 2
    split_retries: int = 5
    search_budget: int | None = None
    forest_steps: int = 400_000
    connect_attempts: int = 50
    limit_1: int | None = None
    limit_2: int | None = None
    extension_retries: int = 3
    cover_attempts: int = 4
    jobs: int = 1
    seed: int = 0
    version: int = CONFIG_VERSION

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.t < 3:
            raise ValueError("t must be at least 3")
        for name in ("prop_alpha", "eps_arb", "rho_v", "rho_d", "core_ratio", "c_merge", "high_fraction", "bad_ratio"):
            x = getattr(self, name)
            if not 0 < x <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.route not in ("auto", "staged", "direct"):
            raise ValueError(f"unknown route {self.route!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)


PROFILES: dict[str, PipelineConfig] = {
    "desk": PipelineConfig(),
    # the proof's constants; only meaningful for astronomically large n
    "asymptotic": PipelineConfig(
        profile="asymptotic", t=10_000, alpha=1 / 450, prop_alpha=1 / 100, eps_arb=0.01,
        rho_v=1e-5, rho_d=1e-9, core_ratio=0.01, c_merge=1e-19, high_fraction=0.25,
        piece_slack=1.0, bad_ratio=1e-20, route="staged",
    ),
}


def load_profile(name: str, **overrides) -> PipelineConfig:
    """A named profile: built-in, or ``$HAMCOVER_PROFILE_DIR/<name>.json``."""
    directory = os.environ.get("HAMCOVER_PROFILE_DIR")
    if directory:
        path = Path(directory) / f"{name}.json"
        if path.is_file():
            data = json.loads(path.read_text(encoding="utf-8"))
            data.setdefault("profile", name)
            return replace(PipelineConfig.from_json(data), **overrides)
    if name not in PROFILES:
        raise KeyError(f"unknown profile {name!r}")
    return replace(PROFILES[name], **overrides)


# --- reporting ----------------------------------------------------------------

@dataclass
class PhaseRecord:
    name: str
    verdict: str
    metrics: dict = field(default_factory=dict)
    seed: int | None = None

    def to_json(self) -> dict:
        return {"metrics": _plain(self.metrics), "name": self.name, "seed": self.seed, "verdict": self.verdict}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in x]
        return sorted(items) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class PipelineReport:
    n: int
    m: int
    max_degree: int
    min_degree: int
    target: int
    count: int = 0
    valid: bool = False
    route: str = ""
    packing_achieved: int = 0
    packing_target: int = 0
    phases: list[PhaseRecord] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.valid and self.count == self.target

    def add(self, name: str, verdict: str, seed: int | None = None, **metrics) -> PhaseRecord:
        rec = PhaseRecord(name, verdict, metrics, seed)
        self.phases.append(rec)
        return rec

    def to_json(self) -> dict:
        return {
            "config": _plain(self.config),
            "count": self.count,
            "graph": {"m": self.m, "max_degree": self.max_degree, "min_degree": self.min_degree, "n": self.n},
            "notes": list(self.notes),
            "optimal": self.optimal,
            "packing": {"achieved": self.packing_achieved, "shortfall": self.packing_target - self.packing_achieved,
                        "target": self.packing_target},
            "phases": [p.to_json() for p in self.phases],
            "route": self.route,
            "target": self.target,
            "valid": self.valid,
        }


# --- leftover -----------------------------------------------------------------

@dataclass
class LeftoverPlan:
    L: Graph
    B: frozenset[int]
    k: int
    diagnostics: dict = field(default_factory=dict)


def _np(g: Graph, p: float | None) -> float:
    if p is not None:
        return p * g.n
    return 2 * g.m / max(g.n - 1, 1)


def compute_leftover(g: Graph, p: float | None, cfg: PipelineConfig) -> tuple[PackingResult, LeftoverPlan]:
    """Pack Hamilton cycles, then describe what they leave uncovered."""
    if g.n == 0:
        raise PreconditionViolated("empty graph")
    packing = pack_hamilton_cycles(
        g, seed=derive_seed(cfg.seed, "pack"), retries=cfg.pack_retries,
        rollback=cfg.pack_rollback, budget=cfg.search_budget,
    )
    L = packing.leftover
    dl = L.max_degree
    B = frozenset(int(v) for v in np.flatnonzero(L.degrees >= (1 - cfg.alpha) * dl)) if dl else frozenset()
    return packing, LeftoverPlan(L, B, math.ceil(dl / 2), _leftover_diagnostics(g, L, B, p, cfg))


def _leftover_diagnostics(g: Graph, L: Graph, B: frozenset[int], p: float | None, cfg: PipelineConfig) -> dict:
    n = g.n
    p_eff = p if p is not None else _np(g, None) / max(n, 1)
    spread = log_spread(n, p_eff) if 0 < p_eff < 1 else 0.0
    dl = L.max_degree
    window = {"low": spread, "high": 4 * spread, "value": dl, "holds": spread <= dl <= 4 * spread}
    size = {"size": len(B), "bound": n ** 0.1, "holds": len(B) <= n ** 0.1}
    # e_G(v, B + N_L(B - v)) for every v
    worst, arg = 0, None
    nbB: dict[int, int] = {}
    for b in B:
        for w in L.adj[b]:
            nbB[w] = nbB.get(w, 0) + 1
    for v in range(n):
        s = set(B)
        s.update(w for w, c in nbB.items() if c > (1 if v in B and v in L.adj[w] else 0))
        s.discard(v)
        e = len(g.adj[v] & s)
        if e > worst:
            worst, arg = e, v
    bad = {"max": worst, "vertex": arg, "bound": cfg.bad_ratio * dl, "holds": worst <= cfg.bad_ratio * dl}
    return {"degree_window": window, "high_degree_size": size, "bad_neighbourhood": bad}


# --- reservoir split --------------------------------------------------------

@dataclass
class PartitionPlan:
    pieces: list[Graph]
    reservoirs: list[frozenset[int]]
    reservoir_degree: np.ndarray
    verdicts: dict = field(default_factory=dict)
    attempts: int = 1


def split_leftover(plan: LeftoverPlan, g: Graph, cfg: PipelineConfig, p: float | None = None) -> PartitionPlan:
    """Random reservoir split of E(L - B) into t pieces, retried until the
    three quality conditions hold or the retry budget is spent."""
    t = cfg.t
    if t < 3:
        raise PreconditionViolated("t must be at least 3", t)
    n = g.n
    B = plan.B
    L = plan.L
    np_ = _np(g, p)
    edges = np.array([e for e in L.edge_list() if e[0] not in B and e[1] not in B], dtype=np.int64).reshape(-1, 2)
    b_mask = np.zeros(n, dtype=bool)
    b_mask[list(B)] = True
    # S_v = N_L(B - v); identical for v outside B
    nb_b = np.zeros(n, dtype=np.int64)
    for b in B:
        for w in L.adj[b]:
            nb_b[w] += 1
    G = _adjacency_matrix(g)
    best = None
    for attempt in range(1, cfg.split_retries + 1):
        rng = np.random.Generator(np.random.PCG64(derive_seed(cfg.seed, "split", attempt)))
        part = rng.integers(0, t, size=n)
        labels = np.empty(len(edges), dtype=np.int64)
        if len(edges):
            pu, pv = part[edges[:, 0]], part[edges[:, 1]]
            same = pu == pv
            # uniform label avoiding the endpoint classes
            r = rng.random(len(edges))
            k_avail = np.where(same, t - 1, t - 2)
            raw = np.floor(r * k_avail).astype(np.int64)
            lo, hi = np.minimum(pu, pv), np.maximum(pu, pv)
            raw = raw + (raw >= lo)
            raw = raw + ((~same) & (raw >= hi))
            labels = raw
        pieces = [Graph.from_edges(n, map(tuple, edges[labels == i].tolist())) for i in range(t)]
        reservoirs = [frozenset(int(v) for v in np.flatnonzero((part == i) & ~b_mask)) for i in range(t)]
        ind = np.zeros((n, t), dtype=np.int64)
        ind[np.arange(n), part] = 1
        ind[b_mask] = 0
        deg_all = np.asarray(G @ ind)
        s_mask = (nb_b > 0) & ~b_mask
        deg_s = np.asarray(G @ (ind * s_mask[:, None]))
        res_deg = deg_all - deg_s
        for v in B:
            # for v in B the excluded set is N_L(B - v)
            own = set(L.adj[v])
            extra = [w for w in own if nb_b[w] == 1 and w not in B]
            for w in extra:
                if w in g.adj[v]:
                    res_deg[v, part[w]] += 1
        dl = L.max_degree
        piece_bound = cfg.piece_slack * (1 - 3 * cfg.alpha / 4) * dl / (t - 2)
        piece_max = max((pc.max_degree for pc in pieces), default=0)
        verdicts = {
            "piece_degree": {"max": piece_max, "bound": piece_bound, "holds": piece_max <= piece_bound},
            "reservoir_size": {"min": min(len(r) for r in reservoirs), "bound": n / (2 * t),
                               "holds": min(len(r) for r in reservoirs) >= n / (2 * t)},
            "reservoir_degree": {"min": int(res_deg.min()) if n else 0, "bound": np_ / (200 * t),
                                 "holds": bool(n == 0 or res_deg.min() >= np_ / (200 * t))},
        }
        pp = PartitionPlan(pieces, reservoirs, res_deg, verdicts, attempt)
        score = sum(v["holds"] for v in verdicts.values())
        if best is None or score > best[0]:
            best = (score, pp)
        if score == 3:
            break
    return best[1]


def _adjacency_matrix(g: Graph) -> sp.csr_matrix:
    e = g.edges
    data = np.ones(2 * g.m, dtype=np.int64)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return sp.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


# --- forests ------------------------------------------------------------------

def f0_size(k: int, alpha: float) -> int:
    return math.ceil((1 - alpha / 2) * k - 1e-9)


def build_F0(pp: PartitionPlan, plan: LeftoverPlan, cfg: PipelineConfig) -> ForestCollection:
    """Approximate-arboricity forests of every piece, padded to ceil((1 - alpha/2)k)."""
    if plan.k <= 0:
        raise PreconditionViolated("k must be positive", plan.k)
    allowed = f0_size(plan.k, cfg.alpha)
    forests: list[LinearForest] = []
    piece_of: list[int] = []
    for i, piece in enumerate(pp.pieces):
        if piece.m == 0:
            continue
        fc = approx_linear_arboricity(piece, cfg.eps_arb, seed=derive_seed(cfg.seed, "F0", i))
        forests.extend(fc.forests)
        piece_of.extend([i] * len(fc))
    if len(forests) > allowed:
        raise BudgetExceeded(len(forests), allowed)
    outside = [v for v in range(plan.L.n) if v not in plan.B]
    j = 0
    while len(forests) < allowed:
        # a one-vertex forest; an empty one if every vertex is in B
        forests.append(LinearForest(((outside[j % len(outside)],),)) if outside else LinearForest())
        piece_of.append(-1)
        j += 1
    return ForestCollection(forests, "F_0", {"piece_of": piece_of, "allowed": allowed})


def _b_incident(plan: LeftoverPlan) -> Graph:
    B = plan.B
    return Graph.from_edges(plan.L.n, (e for e in plan.L.edge_list() if e[0] in B or e[1] in B))


def build_F1(plan: LeftoverPlan, cfg: PipelineConfig) -> ForestCollection:
    """Exactly k forests decomposing the B-incident edges of L."""
    lb = _b_incident(plan)
    if not plan.B or lb.m == 0:
        return ForestCollection([LinearForest() for _ in range(plan.k)], "F_1", {"route": "empty"})
    a_side = [v for v in range(plan.L.n) if v not in plan.B]
    fc = decompose_with_core(
        lb, Bipartition.of(a_side, plan.B), cfg.core_ratio,
        high_fraction=cfg.high_fraction, seed=derive_seed(cfg.seed, "F1"), search_steps=cfg.forest_steps,
    )
    forests = list(fc.forests) + [LinearForest() for _ in range(plan.k - len(fc))]
    return ForestCollection(forests, "F_1", dict(fc.meta))


def merge_F0_F1(
    f0: ForestCollection, f1: ForestCollection, plan: LeftoverPlan, pp: PartitionPlan, cfg: PipelineConfig
) -> ForestCollection:
    """Pair F_0 with a prefix of F_1, drop conflicting F_0 edges, and fold the
    dropped edges back into the unpaired F_1 forests piece by piece."""
    if len(f0) > len(f1):
        raise PreconditionViolated(f"|F_0| = {len(f0)} > |F_1| = {len(f1)}")
    n = plan.L.n
    merged: list[LinearForest] = []
    displaced: list[Edge] = []
    for a, b in zip(f0.forests, f1.forests):
        touched = {x for e in b.edges for x in e}
        drop = [e for e in a.edges if e[0] in touched or e[1] in touched]
        keep = (a.edges - set(drop)) | b.edges
        singles = [p[0] for p in a.paths if len(p) == 1 and p[0] not in touched]
        singles += [p[0] for p in b.paths if len(p) == 1 and p[0] not in {x for e in keep for x in e}]
        merged.append(LinearForest.from_edges(keep, singles))
        displaced.extend(drop)
    rest = f1.forests[len(f0):]
    l_prime = Graph.from_edges(n, displaced)
    d_lp = l_prime.max_degree
    meta = {"delta_L_prime": d_lp, "c_merge_bound": cfg.c_merge * plan.L.max_degree,
            "c_merge_holds": d_lp <= cfg.c_merge * plan.L.max_degree}
    if l_prime.m == 0:
        return ForestCollection(merged + list(rest), "merged", meta)
    t = len(pp.pieces)
    groups: list[list[LinearForest]] = [[] for _ in range(t)]
    for j, f in enumerate(rest):
        groups[j % t].append(f)
    out = list(merged)
    piece_sets = [p.edge_set for p in pp.pieces]
    for i in range(t):
        h_edges = [e for e in displaced if e in piece_sets[i]]
        group = groups[i]
        if not h_edges:
            out.extend(group)
            continue
        h = Graph.from_edges(n, h_edges)
        union_deg: dict[int, int] = {}
        for f in group:
            for e in f.edges:
                for x in e:
                    union_deg[x] = union_deg.get(x, 0) + 1
        d = max(h.max_degree, max((union_deg.get(v, 0) for v in range(n) if h.degrees[v]), default=0))
        if len(group) < 4 * d + 1:
            raise MergeInfeasible(d, len(group))
        res = merge_edges_into_forests(ForestCollection(group, "F_1"), h, d)
        out.extend(res.forests)
    return ForestCollection(out, "merged", meta)


def direct_forests(plan: LeftoverPlan, cfg: PipelineConfig, f1: ForestCollection | None = None) -> ForestCollection:
    """Exactly k linear forests covering L by local search, seeded with F_1."""
    L = plan.L
    k = plan.k
    edges = L.edge_list()
    attempts = []
    if f1 is not None:
        init = {e: i for i, f in enumerate(f1.forests) for e in f.edges}
        attempts.append(("locked", init, list(init)))
        attempts.append(("seeded", init, []))
    attempts.append(("free", None, []))
    for extra in range(0, 3):
        for name, init, locked in attempts if extra == 0 else attempts[-1:]:
            classes, stats = partition_into_linear_forests(
                L.n, edges, k + extra, initial=init, locked=locked,
                seed=derive_seed(cfg.seed, "direct", name, extra), max_steps=cfg.forest_steps,
            )
            if classes is not None:
                return ForestCollection.from_edge_classes(
                    [c for c in classes if c], "generic", mode=name, extra=extra, steps=stats.steps,
                )
    raise DecompositionFailed(f"no split of L into {k + 2} linear forests found")


# --- extension ------------------------------------------------------------

def _split_forest(f: LinearForest) -> list[LinearForest]:
    """Two nonempty linear forests from alternate edges (subsets stay linear)."""
    edges = sorted(f.edges)
    return [LinearForest.from_edges(edges[0::2]), LinearForest.from_edges(edges[1::2])]


def cover_forest(g: Graph, f: LinearForest, p: float | None, cfg: PipelineConfig, seed: int) -> tuple[list[HamiltonCycle], dict]:
    """Hamilton cycles of g that together contain f: one when possible.

    Tries the phased extension, then a direct search with f's edges forced,
    then splits f and recurses.
    """
    info: dict = {"route": None}
    if not f.edges:
        # nothing to cover: any Hamilton cycle through an isolated marker vertex will do
        info["route"] = "empty"
        return [], info
    for r in range(cfg.extension_retries):
        s = derive_seed(seed, "ext", r)
        try:
            plan = make_extension_plan(g, f, s, cfg.limit_1, cfg.limit_2, cfg.connect_attempts, cfg.search_budget)
            res = extend_forest_to_hamilton(g, f, plan, p=p, rho_v=cfg.rho_v, rho_d=cfg.rho_d, strict=False)
            info.update(route="phases", phases=res.phases, hypotheses=res.hypotheses, retries=r)
            return [res.cycle], info
        except (PhaseFailure, SearchFailed) as exc:
            info.setdefault("phase_failures", []).append(str(exc))
        try:
            hc = extend_directly(g, f, s, cfg.search_budget)
            info.update(route="direct", retries=r)
            return [hc], info
        except SearchFailed as exc:
            info.setdefault("direct_failures", []).append(str(exc))
    if len(f.edges) == 1:
        raise PhaseFailure("extend", {"edge": sorted(f.edges)[0], **info})
    out: list[HamiltonCycle] = []
    for j, half in enumerate(_split_forest(f)):
        cycles, _ = cover_forest(g, half, p, cfg, derive_seed(seed, "half", j))
        out.extend(cycles)
    info["route"] = "split"
    return out, info


def _cover_forest_job(args):
    g_n, g_edges, paths, p, cfg_json, seed = args
    g = Graph.from_edges(g_n, map(tuple, g_edges))
    return cover_forest(g, LinearForest(paths), p, PipelineConfig.from_json(cfg_json), seed)


# --- cover ------------------------------------------------------------------

def cover(g: Graph, p: float | None = None, cfg: PipelineConfig | None = None) -> tuple[CoverCertificate, PipelineReport]:
    """Cover E(g) by Hamilton cycles, aiming for ceil(Delta/2) of them."""
    cfg = cfg or PipelineConfig()
    if g.n == 0 or g.m == 0:
        raise PreconditionViolated("graph has no edges")
    report = PipelineReport(g.n, g.m, g.max_degree, g.min_degree, cover_target(g), config=cfg.to_json())
    if p is not None and p > g.n ** (-2 / 3):
        report.notes.append("p above n^(-2/3): outside the proven regime, run heuristically")

    best = None
    error: Exception | None = None
    for attempt in range(max(1, cfg.cover_attempts)):
        sub = PipelineReport(g.n, g.m, g.max_degree, g.min_degree, report.target)
        try:
            cycles, packing = _attempt(g, p, cfg, sub, attempt)
        except (PhaseFailure, DecompositionFailed, PreconditionViolated, BudgetExceeded, MergeInfeasible) as exc:
            # the last three only escape when the staged route is forced
            if cfg.route == "staged":
                raise
            error = exc
            report.add("attempt", "failed", None, attempt=attempt, error=str(exc))
            continue
        if best is None or len(cycles) < len(best[0]):
            best = (cycles, packing, sub)
        if len(cycles) <= report.target:
            break
    if best is None:
        raise PhaseFailure("extend", {"error": str(error)}) from error
    cycles, packing, sub = best
    report.packing_achieved, report.packing_target = packing.achieved, packing.target
    report.route = sub.route
    report.phases.extend(sub.phases)
    cert = CoverCertificate.for_graph(g, cycles)
    vr = verify_cover(g, cert)
    report.valid = vr.valid
    report.count = vr.count
    report.add("verify", "holds" if vr.valid else "violated", None, **vr.to_json())
    if not vr.valid:
        raise PhaseFailure("verify", vr.to_json())
    return cert, report


def _attempt(g: Graph, p, cfg: PipelineConfig, report: PipelineReport, attempt: int):
    """One pass of packing, forests and extension; attempts after the first
    use derived seeds and skip the staged route."""
    acfg = cfg if attempt == 0 else replace(cfg, seed=derive_seed(cfg.seed, "attempt", attempt))
    packing, plan = compute_leftover(g, p, acfg)
    report.add("packing", "holds" if packing.shortfall == 0 else "shortfall", derive_seed(acfg.seed, "pack"),
               achieved=packing.achieved, target=packing.target, attempts=packing.attempts, attempt=attempt)
    report.add("leftover", "holds" if all(d["holds"] for d in plan.diagnostics.values()) else "informational",
               None, m=plan.L.m, max_degree=plan.L.max_degree, B=sorted(plan.B), k=plan.k, **plan.diagnostics)
    if plan.k == 0:
        report.route = "packing"
        return _prune(list(packing.cycles)), packing
    f1: ForestCollection | None = None
    forests: ForestCollection | None = None
    try:
        f1 = build_F1(plan, acfg)
        report.add("F_1", "holds", derive_seed(acfg.seed, "F1"), size=len(f1), **f1.meta)
    except (PreconditionViolated, DecompositionFailed) as exc:
        report.add("F_1", "failed", derive_seed(acfg.seed, "F1"), error=str(exc))
        if cfg.route == "staged":
            raise
    if attempt == 0 and cfg.route in ("auto", "staged") and f1 is not None:
        try:
            forests = _staged_forests(g, p, plan, f1, acfg, report)
            report.route = "staged"
        except (BudgetExceeded, MergeInfeasible, PreconditionViolated, DecompositionFailed) as exc:
            report.add("staged_route", "failed", None, error=str(exc), kind=type(exc).__name__)
            if cfg.route == "staged":
                raise
    if forests is None:
        forests = direct_forests(plan, acfg, f1)
        report.route = "direct"
        report.add("direct_forests", "holds", derive_seed(acfg.seed, "direct"), size=len(forests), **forests.meta)
    assert forests.edge_multiset() == plan.L.edge_list()
    extra = _extend_all(g, p, forests.forests, acfg, report)
    return _prune(list(packing.cycles) + extra), packing


def _prune(cycles: list[HamiltonCycle]) -> list[HamiltonCycle]:
    """Drop cycles, last first, whose edges all lie on other kept cycles."""
    count: dict[Edge, int] = {}
    for c in cycles:
        for e in c.edges:
            count[e] = count.get(e, 0) + 1
    keep = [True] * len(cycles)
    for i in range(len(cycles) - 1, -1, -1):
        if all(count[e] > 1 for e in cycles[i].edges):
            keep[i] = False
            for e in cycles[i].edges:
                count[e] -= 1
    return [c for c, k in zip(cycles, keep) if k]


def _staged_forests(g: Graph, p, plan: LeftoverPlan, f1: ForestCollection, cfg: PipelineConfig, report: PipelineReport) -> ForestCollection:
    pp = split_leftover(plan, g, cfg, p)
    report.add("split", "holds" if all(v["holds"] for v in pp.verdicts.values()) else "informational",
               derive_seed(cfg.seed, "split", pp.attempts), attempts=pp.attempts, **pp.verdicts)
    lb = set(_b_incident(plan).edge_list())
    # L - B edges that touch neither side of B are in the pieces; edges inside B are in F_1
    f0 = build_F0(pp, plan, cfg)
    report.add("F_0", "holds", derive_seed(cfg.seed, "F0"), size=len(f0), allowed=f0.meta["allowed"])
    merged = merge_F0_F1(f0, f1, plan, pp, cfg)
    merged = ForestCollection([f for f in merged.forests if f.edges], "merged", merged.meta)
    report.add("merge", "holds" if merged.meta["c_merge_holds"] else "informational", None,
               size=len(merged), **merged.meta)
    assert set(merged.edge_multiset()) == set(plan.L.edge_list()) and lb <= set(merged.edge_multiset())
    return merged


def _extend_all(g: Graph, p, forests: list[LinearForest], cfg: PipelineConfig, report: PipelineReport) -> list[HamiltonCycle]:
    seeds = [derive_seed(cfg.seed, "forest", i) for i in range(len(forests))]
    if cfg.jobs > 1 and len(forests) > 1:
        cfg_json = cfg.to_json()
        edges = g.edges.tolist()
        jobs = [(g.n, edges, f.paths, p, cfg_json, s) for f, s in zip(forests, seeds)]
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_cover_forest_job, jobs))
    else:
        results = [cover_forest(g, f, p, cfg, s) for f, s in zip(forests, seeds)]
    out: list[HamiltonCycle] = []
    routes: dict[str, int] = {}
    for cycles, info in results:
        out.extend(cycles)
        routes[info["route"]] = routes.get(info["route"], 0) + 1
    failed_hyp = sum(1 for _, info in results if info.get("hypotheses") and not info["hypotheses"]["holds"])
    report.add("extension", "holds" if routes.get("split", 0) == 0 else "suboptimal", derive_seed(cfg.seed, "forest"),
               forests=len(forests), cycles=len(out), routes=dict(sorted(routes.items())),
               hypotheses_failed=failed_hyp)
    return out


# --- oracle -------------------------------------------------------------------

def enumerate_hamilton_cycles(g: Graph) -> list[tuple[int, ...]]:
    """Every Hamilton cycle once, starting at 0 with its second vertex below its last."""
    n = g.n
    if n < 3:
        return []
    adj = [sorted(a) for a in g.adj]
    out: list[tuple[int, ...]] = []
    path = [0]
    seen = [False] * n
    seen[0] = True

    def rec():
        v = path[-1]
        if len(path) == n:
            if 0 in g.adj[v] and path[1] < path[-1]:
                out.append(tuple(path))
            return
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                path.append(w)
                rec()
                path.pop()
                seen[w] = False

    rec()
    return out


def brute_force_min_cover(g: Graph, max_n: int = 8) -> float:
    """Fewest Hamilton cycles covering E(g); ``math.inf`` if impossible."""
    if g.n > max_n:
        raise TooLarge(f"n = {g.n} > {max_n}")
    if g.m == 0:
        return 0
    cycles = enumerate_hamilton_cycles(g)
    edges = g.edge_list()
    idx = {e: i for i, e in enumerate(edges)}
    A = np.zeros((len(edges), len(cycles)))
    for j, c in enumerate(cycles):
        for i in range(len(c)):
            u, v = c[i], c[(i + 1) % len(c)]
            A[idx[(min(u, v), max(u, v))], j] = 1
    if not cycles or (A.sum(axis=1) == 0).any():
        return math.inf
    res = milp(
        c=np.ones(len(cycles)),
        constraints=LinearConstraint(A, lb=np.ones(len(edges)), ub=np.inf),
        integrality=np.ones(len(cycles)),
        bounds=Bounds(0, 1),
    )
    if not res.success:
        raise RuntimeError(f"set-cover solver failed: {res.message}")
    return int(round(res.fun))
