import json

import pytest
from hypothesis import given

from conftest import cycle, graphs
from hamcover import formats
from hamcover.errors import MalformedInput
from hamcover.graph import CoverCertificate, HamiltonCycle


@given(graphs(max_n=12))
def test_edge_list_roundtrip(g):
    assert formats.parse_edge_list(formats.format_edge_list(g)) == g


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("3\n", 1),
        ("3 2\n0 1\n", 2),
        ("3 1\n0 x\n", 2),
        ("3 2\n0 1\n1 1\n", 3),
        ("3 2\n0 1\n1 0\n", 3),
        ("3 1\n0 7\n", 2),
    ],
)
def test_malformed_edge_lists_carry_line_numbers(text, line):
    with pytest.raises(MalformedInput) as info:
        formats.parse_edge_list(text)
    assert info.value.line == line


def test_certificate_roundtrip(tmp_path):
    g = cycle(5)
    cert = CoverCertificate.for_graph(g, [HamiltonCycle.of([0, 1, 2, 3, 4])])
    path = tmp_path / "c.json"
    formats.write_certificate(cert, g.n, path)
    n, back = formats.read_certificate(path)
    assert n == 5 and back.cycles == cert.cycles and back.graph_hash == g.digest()
    text = path.read_text()
    assert list(json.loads(text)) == sorted(json.loads(text)) and text.endswith("\n")


def test_bad_certificate(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"n": 3}')
    with pytest.raises(MalformedInput):
        formats.read_certificate(path)
