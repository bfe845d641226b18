import itertools

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hamcover.graph import Graph, build_graph

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def from_nx(h: nx.Graph) -> Graph:
    h = nx.convert_node_labels_to_integers(h)
    return build_graph(h.number_of_nodes(), list(h.edges()))


def cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return build_graph(n, list(itertools.combinations(range(n), 2)))


def petersen() -> Graph:
    return from_nx(nx.petersen_graph())


TOYS = {
    "C4": cycle(4),
    "C5": cycle(5),
    "C6": cycle(6),
    "K4": complete(4),
    "K5": complete(5),
    "Petersen": petersen(),
}


@st.composite
def graphs(draw, min_n=1, max_n=10, min_p=0.0, max_p=1.0):
    """Arbitrary simple graphs given by vertex count and an edge subset."""
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return build_graph(n, [e for e, keep in zip(pairs, mask) if keep])


@st.composite
def bipartite_graphs(draw, max_side=8):
    a = draw(st.integers(1, max_side))
    b = draw(st.integers(1, max_side))
    pairs = [(i, a + j) for i in range(a) for j in range(b)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    g = build_graph(a + b, [e for e, keep in zip(pairs, mask) if keep])
    return g, list(range(a)), list(range(a, a + b))


@pytest.fixture
def toys():
    return dict(TOYS)


ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
