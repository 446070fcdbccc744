"""Synthetic attributed graphs with planted relationship communities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluate import LabelSet
from .graph import AttributeTable, Graph, RelationshipSpec, load_attributes


@dataclass
class PlantedGraph:
    graph: Graph
    attributes: AttributeTable
    labels: LabelSet
    community: np.ndarray
    attributed: np.ndarray


def make_planted_communities(
    n_nodes: int = 100,
    n_communities: int = 2,
    coverage: float = 0.4,
    p_in: float = 0.2,
    p_out: float = 0.02,
    random_state=None,
) -> PlantedGraph:
    """Stochastic block model whose blocks stand for relationships.

    Community ``c`` indicates relationship ``c`` through categorical
    attribute ``attr_c``. A ``coverage`` fraction of each community's
    members carries the value ``group_c``; the rest are unattributed.
    Edges inside community ``c`` are labeled with relationship ``c``;
    cross-community edges stay unlabeled.
    """
    rng = np.random.default_rng(random_state)
    community = np.arange(n_nodes) * n_communities // n_nodes
    attributed = np.zeros(n_nodes, dtype=bool)
    for c in range(n_communities):
        members = np.flatnonzero(community == c)
        k = int(round(coverage * members.size))
        attributed[rng.choice(members, size=k, replace=False)] = True

    iu, ju = np.triu_indices(n_nodes, k=1)
    same = community[iu] == community[ju]
    keep = rng.random(iu.size) < np.where(same, p_in, p_out)
    edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
    graph = Graph([str(u) for u in range(n_nodes)], edges)

    spec = [RelationshipSpec(f"rel_{c}", categorical=(f"attr_{c}",)) for c in range(n_communities)]
    records = [(str(u), f"attr_{community[u]}", f"group_{community[u]}") for u in np.flatnonzero(attributed)]
    table = load_attributes(graph, spec, records)

    labels = {}
    for e, (u, v) in enumerate(graph.edge_endpoints):
        if community[u] == community[v]:
            labels[e] = frozenset({int(community[u])})
    return PlantedGraph(graph, table, LabelSet(labels, table.relationship_names), community, attributed)
