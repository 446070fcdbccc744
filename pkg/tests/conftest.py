import numpy as np
import pytest

from linkprofiler.graph import Graph, RelationshipSpec, build_graph, load_attributes
from linkprofiler.similarity import SimilarityPairs


@pytest.fixture
def triangle():
    return build_graph([("1", "2"), ("2", "3"), ("1", "3")])


@pytest.fixture
def path3():
    return build_graph([("1", "2"), ("2", "3")])


@pytest.fixture
def k4():
    return build_graph([("1", "2"), ("1", "3"), ("1", "4"), ("2", "3"), ("2", "4"), ("3", "4")])


@pytest.fixture
def planted4():
    """Nodes 1,2 share a school; 3,4 share an employer; 2-3 bridges them."""
    g = build_graph([("1", "2"), ("3", "4"), ("2", "3")])
    spec = [RelationshipSpec("schoolmate", categorical=("school",)),
            RelationshipSpec("colleague", categorical=("employer",))]
    table = load_attributes(g, spec, [("1", "school", "UIUC"), ("2", "school", "UIUC"),
                                      ("3", "employer", "Google"), ("4", "employer", "Google")])
    return g, table


def random_graph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph([str(u) for u in range(n)], edges)


def random_pairs(rng, graph, M, density=0.4):
    n = graph.node_count
    rows = []
    for _ in range(M):
        rows.append([(i, j, float(rng.uniform(0.1, 1.0)))
                     for i in range(n) for j in range(i + 1, n) if rng.random() < density])
    return SimilarityPairs([f"r{m}" for m in range(M)], rows)


def random_weights(rng, E, M, floor=0.05):
    w = rng.dirichlet(np.ones(M), size=E)
    w = floor + (1 - M * floor) * w
    return w


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
