import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from linkprofiler.graph import RelationshipSpec, build_graph, load_attributes
from linkprofiler.similarity import (categorical_similarity, combine_similarities, compute_similarity_pairs,
                                     numerical_similarity)

from conftest import random_graph


@pytest.mark.parametrize("a, b, expected", [
    ({"UIUC"}, {"Stanford"}, 0.0),
    ({"UIUC"}, {"UIUC", "Stanford"}, 1.0),
    (set(), {"UIUC"}, 0.0),
])
def test_categorical(a, b, expected):
    assert categorical_similarity(a, b) == expected
    assert categorical_similarity(b, a) == expected


@pytest.mark.parametrize("xi, xj, expected", [(23, 20, 0.9), (50, 20, 0.0), (7, 7, 1.0)])
def test_numerical(xi, xj, expected):
    assert numerical_similarity(xi, xj, 30) == pytest.approx(expected, abs=1e-15)


def test_numerical_degenerate_and_bad():
    assert numerical_similarity(3, 3, 0) == 1.0
    with pytest.raises(ValueError):
        numerical_similarity(float("nan"), 1, 2)
    with pytest.raises(ValueError):
        numerical_similarity(1, float("inf"), 2)


@pytest.mark.parametrize("scores, expected", [([0, 0.1], 0), ([1, 0.9], 0.9), ([0.5], 0.5)])
def test_combine(scores, expected):
    assert combine_similarities(scores) == expected


def test_combine_empty():
    with pytest.raises(ValueError):
        combine_similarities([])


@given(st.floats(0, 100), st.floats(0, 100), st.floats(0.001, 200))
def test_numerical_symmetric_in_range(a, b, d):
    s = numerical_similarity(a, b, d)
    assert s == numerical_similarity(b, a, d)
    assert 0.0 <= s <= 1.0


def _university_table(graph, records, numerical=()):
    spec = [RelationshipSpec("schoolmate", categorical=("university",), numerical=tuple(numerical))]
    return load_attributes(graph, spec, records)


def test_university_example(triangle):
    t = _university_table(triangle, [("1", "university", "UIUC"), ("2", "university", "Stanford"),
                                     ("3", "university", "UIUC"), ("3", "university", "Stanford")])
    assert compute_similarity_pairs(t, triangle)[0] == ((0, 2, 1.0), (1, 2, 1.0))


def test_university_and_age_example(triangle):
    recs = [("1", "university", "UIUC"), ("2", "university", "Stanford"),
            ("3", "university", "UIUC"), ("3", "university", "Stanford"),
            ("1", "age", "50"), ("2", "age", "23"), ("3", "age", "20")]
    t = _university_table(triangle, recs, numerical=("age",))
    pairs = compute_similarity_pairs(t, triangle)[0]
    # f(1,2) = min(0, 0.1), f(1,3) = min(1, 0), f(2,3) = min(1, 0.9)
    assert [(i, j) for i, j, _ in pairs] == [(1, 2)]
    assert pairs[0][2] == pytest.approx(0.9, abs=1e-15)


def test_unattributed(triangle):
    t = _university_table(triangle, [])
    assert compute_similarity_pairs(t, triangle)[0] == ()


def test_all_same_value(k4):
    t = _university_table(k4, [(str(u), "university", "UIUC") for u in range(1, 5)])
    pairs = compute_similarity_pairs(t, k4)[0]
    assert len(pairs) == math.comb(4, 2) == 6
    assert all(f == 1.0 for _, _, f in pairs)


def _brute_force(table, graph, K):
    """All-pairs double loop; numerical-only relationships keep pairs within K hops."""
    G = nx.Graph()
    G.add_nodes_from(range(graph.node_count))
    G.add_edges_from(graph.edge_endpoints)
    dist = dict(nx.all_pairs_shortest_path_length(G, cutoff=K))
    out = []
    for rel in table.relationships:
        rows = []
        for i in range(graph.node_count):
            for j in range(i + 1, graph.node_count):
                scores = []
                for a in rel.categorical:
                    scores.append(float(bool(table.categorical[a][i] & table.categorical[a][j])))
                for a in rel.numerical:
                    x, y = table.numerical[a][i], table.numerical[a][j]
                    if np.isnan(x) or np.isnan(y):
                        scores.append(0.0)
                    else:
                        md = table.max_diff[a]
                        scores.append(1.0 if md == 0 else 1 - abs(x - y) / md)
                f = min(scores)
                if not rel.categorical and j not in dist[i]:
                    f = 0.0
                if f > 0:
                    rows.append((i, j, f))
        out.append(rows)
    return out


@pytest.mark.parametrize("seed", range(8))
def test_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 51))
    g = random_graph(rng, n, 4.0 / n)
    spec = [RelationshipSpec("a", categorical=("uni",)),
            RelationshipSpec("b", categorical=("uni", "job"), numerical=("age",)),
            RelationshipSpec("c", numerical=("age",))]
    recs = []
    for u in range(n):
        for attr, vals in (("uni", "ABC"), ("job", "XY")):
            for v in vals:
                if rng.random() < 0.25:
                    recs.append((str(u), attr, v))
        if rng.random() < 0.5:
            recs.append((str(u), "age", str(int(rng.integers(18, 70)))))
    t = load_attributes(g, spec, recs)
    got = compute_similarity_pairs(t, g, K=2)
    want = _brute_force(t, g, K=2)
    for m in range(3):
        assert [(i, j) for i, j, _ in got[m]] == [(i, j) for i, j, _ in want[m]]
        np.testing.assert_allclose([f for *_, f in got[m]], [f for *_, f in want[m]], rtol=0, atol=1e-15)
        assert all(0 < f <= 1 and i < j for i, j, f in got[m])


def test_pairs_dump(tmp_path, triangle):
    t = _university_table(triangle, [("1", "university", "U"), ("3", "university", "U")])
    pairs = compute_similarity_pairs(t, triangle)
    pairs.write(tmp_path / "pairs.tsv", triangle)
    assert (tmp_path / "pairs.tsv").read_text() == "0\t1\t3\t1\n"
