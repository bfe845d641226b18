"""Text and JSON file formats.

Edge list: first line ``n m``, then ``m`` lines ``u v``; ASCII decimal, LF.
Certificate: ``{"n", "graph_hash", "cycles"}``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import GraphInputError, MalformedInput
from .graph import CoverCertificate, Graph, build_graph


def dumps(obj) -> str:
    """Stable JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="ascii", newline="\n")


def parse_edge_list(text: str) -> Graph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedInput("empty file", 1)
    head = lines[0].split()
    if len(head) != 2 or not all(t.isdigit() for t in head):
        raise MalformedInput("header must be 'n m'", 1)
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise MalformedInput(f"header announces {m} edges, found {len(lines) - 1}", len(lines))
    edges = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2 or not all(t.isdigit() for t in parts):
            raise MalformedInput(f"expected 'u v', got {line!r}", i)
        edges.append((int(parts[0]), int(parts[1])))
    try:
        return build_graph(n, edges)
    except GraphInputError as exc:
        bad = _first_bad_line(n, edges)
        raise MalformedInput(str(exc), bad) from exc
    except ValueError as exc:
        raise MalformedInput(str(exc), 1) from exc


def _first_bad_line(n: int, edges: list[tuple[int, int]]) -> int | None:
    seen = set()
    for i, (u, v) in enumerate(edges, start=2):
        e = (min(u, v), max(u, v))
        if u == v or not (0 <= u < n and 0 <= v < n) or e in seen:
            return i
        seen.add(e)
    return None


def read_edge_list(path: str | Path) -> Graph:
    text = Path(path).read_bytes().decode("ascii", errors="strict")
    return parse_edge_list(text)


def write_certificate(cert: CoverCertificate, n: int, path: str | Path) -> None:
    Path(path).write_text(dumps(cert.to_json(n)), encoding="utf-8")


def read_certificate(path: str | Path) -> tuple[int, CoverCertificate]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return int(data["n"]), CoverCertificate.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad certificate: {exc}") from exc
