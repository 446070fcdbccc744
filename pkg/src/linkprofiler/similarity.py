"""Attribute similarity scores and the sparse set of constrained node pairs."""

from __future__ import annotations

import math
from collections import defaultdict, deque
from collections.abc import Iterable, Sequence
from itertools import combinations
from pathlib import Path

from .graph import AttributeTable, Graph


def categorical_similarity(set_i: Iterable, set_j: Iterable) -> float:
    """1.0 if the two value sets share at least one value, else 0.0.

    A missing attribute (empty set) never matches.
    """
    a = set_i if isinstance(set_i, (set, frozenset)) else set(set_i)
    return 1.0 if not a.isdisjoint(set_j) else 0.0


def numerical_similarity(x_i: float, x_j: float, max_diff: float) -> float:
    """One minus the absolute difference normalized by ``max_diff``."""
    if not (math.isfinite(x_i) and math.isfinite(x_j) and math.isfinite(max_diff)):
        raise ValueError("numerical similarity needs finite inputs")
    if max_diff < 0:
        raise ValueError("max_diff must be non-negative")
    if max_diff == 0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - abs(x_i - x_j) / max_diff))


def combine_similarities(scores: Sequence[float]) -> float:
    """Similar only if similar on every attribute: the minimum score."""
    if len(scores) == 0:
        raise ValueError("cannot combine an empty list of similarities")
    return float(min(scores))


def pair_similarity(table: AttributeTable, m: int, i: int, j: int) -> float:
    """Combined similarity of nodes ``i`` and ``j`` under relationship ``m``."""
    rel = table.relationships[m]
    scores = []
    for attr in rel.categorical:
        values = table.categorical[attr]
        scores.append(categorical_similarity(values[i], values[j]))
    for attr in rel.numerical:
        values = table.numerical[attr]
        xi, xj = values[i], values[j]
        if math.isnan(xi) or math.isnan(xj):
            scores.append(0.0)
        else:
            scores.append(numerical_similarity(xi, xj, table.max_diff[attr]))
    return combine_similarities(scores)


class SimilarityPairs:
    """Constrained pairs ``(i, j, f)`` with ``i < j`` and ``f > 0``, per relationship."""

    def __init__(self, names: Sequence[str], per_relationship: Sequence[Sequence[tuple[int, int, float]]]):
        if len(names) != len(per_relationship):
            raise ValueError("one pair list per relationship required")
        self.relationship_names = tuple(names)
        rows = []
        for pairs in per_relationship:
            cleaned = []
            for i, j, f in pairs:
                i, j, f = int(i), int(j), float(f)
                if i == j:
                    raise ValueError("self-pairs are not allowed")
                if not 0.0 < f <= 1.0:
                    raise ValueError(f"similarity {f} outside (0, 1]")
                if i > j:
                    i, j = j, i
                cleaned.append((i, j, f))
            cleaned.sort()
            for a, b in zip(cleaned, cleaned[1:]):
                if a[:2] == b[:2]:
                    raise ValueError(f"duplicate pair {a[:2]}")
            rows.append(tuple(cleaned))
        self.per_relationship = tuple(rows)

    @property
    def relationship_count(self) -> int:
        return len(self.per_relationship)

    def __getitem__(self, m: int) -> tuple[tuple[int, int, float], ...]:
        return self.per_relationship[m]

    def __len__(self) -> int:
        return sum(len(p) for p in self.per_relationship)

    def unique_pairs(self) -> list[tuple[int, int]]:
        """Sorted union of constrained pairs across relationships."""
        return sorted({(i, j) for rows in self.per_relationship for i, j, _ in rows})

    def scaled(self, factor: float) -> "SimilarityPairs":
        return SimilarityPairs(self.relationship_names,
                               [[(i, j, f * factor) for i, j, f in rows] for rows in self.per_relationship])

    def write(self, path: str | Path, graph: Graph) -> None:
        """Debug dump: ``m <TAB> id_i <TAB> id_j <TAB> f``."""
        with open(path, "w") as fh:
            for m, rows in enumerate(self.per_relationship):
                for i, j, f in rows:
                    fh.write(f"{m}\t{graph.node_ids[i]}\t{graph.node_ids[j]}\t{f:.12g}\n")


def _nodes_within(graph: Graph, source: int, depth: int) -> list[int]:
    seen = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if seen[u] == depth:
            continue
        for v, _ in graph.adjacency[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                queue.append(v)
    return [v for v in seen if v != source]


def _candidate_pairs(table: AttributeTable, graph: Graph, m: int, K: int) -> set[tuple[int, int]]:
    rel = table.relationships[m]
    if rel.categorical:
        # any pair with f > 0 shares a value on every categorical attribute,
        # so bucketing on the first one is a complete candidate generator
        values = table.categorical[rel.categorical[0]]
        buckets: dict[object, list[int]] = defaultdict(list)
        for u, vals in enumerate(values):
            for val in vals:
                buckets[val].append(u)
        out = set()
        for members in buckets.values():
            out.update(combinations(members, 2))
        return out
    present = [u for u in range(graph.node_count)
               if all(not math.isnan(table.numerical[a][u]) for a in rel.numerical)]
    attributed = set(present)
    out = set()
    for u in present:
        for v in _nodes_within(graph, u, K):
            if v in attributed and u < v:
                out.add((u, v))
    return out


def compute_similarity_pairs(table: AttributeTable, graph: Graph, K: int = 3) -> SimilarityPairs:
    """Materialize every pair with positive combined similarity.

    Relationships with a categorical attribute are enumerated through an
    inverted value index, so cost scales with the output. Purely numerical
    relationships are restricted to attributed pairs within ``K`` hops.
    """
    if table.node_count not in (0, graph.node_count):
        raise ValueError("attribute table does not match the graph")
    per_rel = []
    for m in range(table.relationship_count):
        rows = []
        for i, j in _candidate_pairs(table, graph, m, K):
            f = pair_similarity(table, m, i, j)
            if f > 0:
                rows.append((i, j, f))
        per_rel.append(rows)
    return SimilarityPairs(table.relationship_names, per_rel)
