"""Seeded experiment sweeps; one JSON object per run on stdout.

    python scripts/run_experiments.py desk --n 500 --p 0.15 --seeds 20
    python scripts/run_experiments.py window --n 100000 --seeds 20
    python scripts/run_experiments.py psweep --n 300 --ps 0.02 0.05 0.1 0.2 0.4 --seeds 5
"""

from __future__ import annotations

import argparse
import gc
import json
import math
import sys
import time

from hamcover.errors import HamcoverError
from hamcover.graph import verify_cover
from hamcover.hamilton import pack_hamilton_cycles
from hamcover.pipeline import load_profile, cover
from hamcover.random_model import SampleSpec, check_degree_window, high_degree_set, sample_gnp
from hamcover.seeding import derive_seed


def emit(row: dict) -> None:
    print(json.dumps(row, sort_keys=True), flush=True)


def cover_run(n: int, p: float, seed: int, master: int, profile: str) -> dict:
    g = sample_gnp(SampleSpec(n, p, derive_seed(master, "desk", seed)))
    row = {"n": n, "p": p, "seed": seed, "delta": g.max_degree, "min_degree": g.min_degree,
           "target": math.ceil(g.max_degree / 2)}
    pack = pack_hamilton_cycles(g, seed=derive_seed(master, "pack", seed))
    row.update(packed=pack.achieved, pack_target=pack.target)
    t0 = time.time()
    try:
        cert, rep = cover(g, p, load_profile(profile, seed=seed))
        row.update(count=rep.count, valid=verify_cover(g, cert).valid, route=rep.to_json().get("route"))
    except HamcoverError as exc:
        row.update(count=None, valid=False, error=type(exc).__name__)
    row["seconds"] = round(time.time() - t0, 3)
    row["optimal"] = row["count"] == row["target"]
    return row


def summarise(rows: list[dict]) -> dict:
    k = len(rows)
    return {
        "summary": True,
        "runs": k,
        "valid": sum(r["valid"] for r in rows),
        "optimal": sum(r["optimal"] for r in rows),
        "pack_full": sum(r["packed"] == r["pack_target"] for r in rows),
        "max_seconds": max((r["seconds"] for r in rows), default=0),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--master", type=int, default=20240501)
    sub = ap.add_subparsers(dest="cmd", required=True)
    d = sub.add_parser("desk", help="cover and packing on G(n, p)")
    d.add_argument("--n", type=int, default=500)
    d.add_argument("--p", type=float, default=0.15)
    d.add_argument("--seeds", type=int, default=20)
    d.add_argument("--profile", default="desk")
    w = sub.add_parser("window", help="degree window and high-degree set at p = 100 ln n / n")
    w.add_argument("--n", type=int, default=10**5)
    w.add_argument("--seeds", type=int, default=20)
    w.add_argument("--alpha", type=float, default=0.01)
    s = sub.add_parser("psweep", help="cover quality as p grows past n^(-2/3)")
    s.add_argument("--n", type=int, default=300)
    s.add_argument("--ps", type=float, nargs="+", default=[0.02, 0.05, 0.1, 0.2, 0.4])
    s.add_argument("--seeds", type=int, default=5)
    s.add_argument("--profile", default="desk")
    args = ap.parse_args(argv)

    if args.cmd == "desk":
        rows = []
        for seed in range(args.seeds):
            rows.append(cover_run(args.n, args.p, seed, args.master, args.profile))
            emit(rows[-1])
        emit(summarise(rows))
    elif args.cmd == "window":
        n = args.n
        p = 100 * math.log(n) / n
        spread = 2 * math.sqrt(2 * p * n * math.log(n))
        for seed in range(args.seeds):
            t0 = time.time()
            g = sample_gnp(SampleSpec(n, p, derive_seed(args.master, "big", seed)))
            emit({"seed": seed, "max_degree": g.max_degree, "min_degree": g.min_degree,
                  "upper": p * n + spread, "lower": p * n - spread,
                  "window": check_degree_window(g, p).verdict,
                  "high_degree": len(high_degree_set(g, p, args.alpha)), "cap": n ** 0.1,
                  "seconds": round(time.time() - t0, 2)})
            del g
            gc.collect()
    else:
        cap = args.n ** (-2 / 3)
        for p in args.ps:
            rows = [cover_run(args.n, p, seed, args.master, args.profile) for seed in range(args.seeds)]
            emit({"p": p, "above_cap": p > cap, **summarise(rows)})
    return 0


if __name__ == "__main__":
    sys.exit(main())
