"""Command-line entry point: ``hamcover <command> [flags]``.

Exit codes: 0 success, 1 failure, 2 valid but suboptimal cover,
64 usage error, 65 malformed input, 66 unreadable input.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import formats
from .errors import HamcoverError, MalformedInput, ModeUnavailable, TooLarge
from .forests import brute_force_linear_arboricity
from .graph import degree_stats, verify_cover
from .pipeline import brute_force_min_cover, cover, load_profile
from .random_model import (
    ExpansionParams,
    SampleSpec,
    check_cross_edges,
    check_degree_window,
    check_expansion,
    high_degree_report,
    sample_gnp,
)

EXIT_OK, EXIT_FAIL, EXIT_SUBOPTIMAL = 0, 1, 2
EXIT_USAGE, EXIT_DATAERR, EXIT_NOINPUT = 64, 65, 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _probability(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= x <= 1:
        raise argparse.ArgumentTypeError("probability must lie in [0, 1]")
    return x


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hamcover", description="Hamilton-cycle covers of random graphs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="sample G(n, p) to an edge-list file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=_probability, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    c = sub.add_parser("cover", help="cover a graph by Hamilton cycles")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--p", type=_probability, default=None)
    c.add_argument("--profile", default="desk")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--cert-out", required=True)
    c.add_argument("--report-out", required=True)

    v = sub.add_parser("verify", help="check a cover certificate")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--cert", required=True)
    v.add_argument("--report-out", default=None)

    k = sub.add_parser("check-props", help="random-graph property checks")
    k.add_argument("--in", dest="inp", required=True)
    k.add_argument("--p", type=_probability, required=True)
    k.add_argument("--which", choices=["degree", "expansion", "cross", "highdeg"], required=True)
    k.add_argument("--mode", choices=["exact", "sampled"], default="sampled")
    k.add_argument("--budget", type=int, default=1000)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--alpha", type=float, default=0.01)
    k.add_argument("--s", type=int, default=2)
    k.add_argument("--d", type=int, default=1)
    k.add_argument("--size-a", type=int, default=1)
    k.add_argument("--size-b", type=int, default=1)
    k.add_argument("--min-edges", type=int, default=1)
    k.add_argument("--report-out", default=None)

    o = sub.add_parser("oracle", help="brute-force oracles for small graphs")
    o.add_argument("--in", dest="inp", required=True)
    o.add_argument("--which", choices=["mincover", "linarb"], required=True)

    s = sub.add_parser("stats", help="degree statistics")
    s.add_argument("--in", dest="inp", required=True)
    return ap


def _read_graph(path: str):
    p = Path(path)
    try:
        return formats.read_edge_list(p)
    except (OSError, UnicodeDecodeError) as exc:
        if isinstance(exc, UnicodeDecodeError):
            raise MalformedInput(f"non-ASCII input: {exc.reason}") from exc
        raise


def _check_out(*paths: str | None) -> None:
    for path in paths:
        if path is not None and not Path(path).resolve().parent.is_dir():
            raise UsageError(f"output directory for {path!r} does not exist")


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _gen(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be positive")
    _check_out(args.out)
    g = sample_gnp(SampleSpec(args.n, args.p, args.seed))
    formats.write_edge_list(g, args.out)
    return EXIT_OK


def _cover(args) -> int:
    _check_out(args.cert_out, args.report_out)
    g = _read_graph(args.inp)
    try:
        cfg = load_profile(args.profile, seed=args.seed, jobs=max(1, args.jobs))
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    try:
        cert, report = cover(g, args.p, cfg)
    except HamcoverError as exc:
        _emit(formats.dumps({"error": str(exc), "kind": type(exc).__name__, "valid": False}), args.report_out)
        return EXIT_FAIL
    formats.write_certificate(cert, g.n, args.cert_out)
    _emit(formats.dumps(report.to_json()), args.report_out)
    if not report.valid:
        return EXIT_FAIL
    return EXIT_OK if report.optimal else EXIT_SUBOPTIMAL


def _verify(args) -> int:
    _check_out(args.report_out)
    g = _read_graph(args.inp)
    n, cert = formats.read_certificate(args.cert)
    if n != g.n:
        rep = {"hash_matches": False, "valid": False, "reason": f"certificate n={n} but graph n={g.n}"}
        _emit(formats.dumps(rep), args.report_out)
        return EXIT_FAIL
    vr = verify_cover(g, cert)
    _emit(formats.dumps(vr.to_json()), args.report_out)
    return EXIT_OK if vr.valid else EXIT_FAIL


def _check(args) -> int:
    _check_out(args.report_out)
    g = _read_graph(args.inp)
    if args.which == "degree":
        rep = check_degree_window(g, args.p)
    elif args.which == "highdeg":
        rep = high_degree_report(g, args.p, args.alpha)
    elif args.which == "expansion":
        try:
            params = ExpansionParams(args.s, args.d, args.alpha)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rep = check_expansion(g, params, args.mode, args.budget, args.seed)
    else:
        rep = check_cross_edges(g, args.size_a, args.size_b, args.min_edges, args.mode, args.budget, args.seed)
    _emit(formats.dumps(rep.to_json()), args.report_out)
    return EXIT_OK if rep.holds else EXIT_FAIL


def _oracle(args) -> int:
    g = _read_graph(args.inp)
    if args.which == "mincover":
        opt = brute_force_min_cover(g)
        out = {"mincover": None if opt == math.inf else opt, "coverable": opt != math.inf,
               "lower_bound": math.ceil(g.max_degree / 2)}
    else:
        count, fc = brute_force_linear_arboricity(g)
        out = {"linear_arboricity": count, "witness": fc.to_json()}
    sys.stdout.write(formats.dumps(out))
    return EXIT_OK


def _stats(args) -> int:
    g = _read_graph(args.inp)
    sys.stdout.write(formats.dumps(degree_stats(g).to_json()))
    return EXIT_OK


COMMANDS = {"gen": _gen, "cover": _cover, "verify": _verify, "check-props": _check, "oracle": _oracle, "stats": _stats}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"hamcover: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedInput as exc:
        print(f"hamcover: malformed input: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except OSError as exc:
        print(f"hamcover: cannot read input: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except (TooLarge, ModeUnavailable) as exc:
        print(f"hamcover: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HamcoverError as exc:
        print(f"hamcover: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
