"""Input checks shared by the estimator and the CLI."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from numbers import Real

import numpy as np

from .exceptions import ConfigError
from .graph import AttributeTable, Graph
from .similarity import SimilarityPairs


def check_graph(graph) -> Graph:
    if not isinstance(graph, Graph):
        raise TypeError(f"expected a linkprofiler Graph, got {type(graph).__name__}")
    if graph.edge_count == 0:
        raise ValueError("graph has no edges")
    return graph


def check_side_information(info, graph: Graph):
    """Accept an :class:`AttributeTable` or precomputed :class:`SimilarityPairs`."""
    if isinstance(info, AttributeTable):
        if info.node_count not in (0, graph.node_count):
            raise ValueError(f"attribute table covers {info.node_count} nodes, graph has {graph.node_count}")
        return info
    if isinstance(info, SimilarityPairs):
        for rows in info.per_relationship:
            for i, j, _ in rows:
                if j >= graph.node_count:
                    raise ValueError(f"pair ({i}, {j}) references a node outside the graph")
        return info
    raise TypeError(f"expected AttributeTable or SimilarityPairs, got {type(info).__name__}")


def check_thresholds(thresholds, names: Sequence[str]) -> tuple[float, ...]:
    """Broadcast a scalar, sequence or name->value mapping to one threshold per relationship."""
    M = len(names)
    if isinstance(thresholds, Real):
        out = [float(thresholds)] * M
    elif isinstance(thresholds, Mapping):
        missing = [n for n in names if n not in thresholds]
        if missing:
            raise ConfigError(f"no threshold for relationship(s) {missing}")
        out = [float(thresholds[n]) for n in names]
    else:
        out = [float(t) for t in thresholds]
        if len(out) != M:
            raise ConfigError(f"expected {M} thresholds, got {len(out)}")
    if any(not (0.0 <= t <= 1.0) or np.isnan(t) for t in out):
        raise ConfigError(f"thresholds must lie in [0, 1], got {out}")
    return tuple(out)
