"""Path-wise closeness between nodes under per-relationship edge weights."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError
from .graph import Graph
from .pathfinder import PathDescriptor

DIRECTIONS = ("mean", "forward")


@dataclass(frozen=True)
class ClosenessConfig:
    """Maximum path length ``K``, decay ``alpha`` and how directions combine.

    ``direction="mean"`` averages the reachability of ``i -> j`` and
    ``j -> i``; ``"forward"`` uses ``i -> j`` only.
    """

    K: int = 3
    alpha: float = 0.8
    direction: str = "mean"

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ConfigError(f"K must be a positive integer, got {self.K!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")


class AffinityGraphs:
    """Edge weights ``weights[e, m]``: probability that edge ``e`` carries relationship ``m``."""

    def __init__(self, graph: Graph, weights: np.ndarray, relationship_names: Sequence[str] | None = None):
        weights = np.asarray(weights, dtype=float)
        if weights.ndim != 2 or weights.shape[0] != graph.edge_count:
            raise ValueError(f"weights must have shape ({graph.edge_count}, M), got {weights.shape}")
        if relationship_names is None:
            relationship_names = [f"rel_{m}" for m in range(weights.shape[1])]
        if len(relationship_names) != weights.shape[1]:
            raise ValueError("one name per relationship column required")
        self.graph = graph
        self.weights = weights
        self.relationship_names = tuple(relationship_names)

    @classmethod
    def uniform(cls, graph: Graph, M: int, relationship_names: Sequence[str] | None = None) -> "AffinityGraphs":
        if M < 1:
            raise ValueError("need at least one relationship")
        w = np.ones((graph.edge_count, M)) if M == 1 else np.full((graph.edge_count, M), 1.0 / M)
        return cls(graph, w, relationship_names)

    @property
    def M(self) -> int:
        return self.weights.shape[1]

    def degrees(self) -> np.ndarray:
        """Weighted degree ``d[u, m]``: sum of ``weights[e, m]`` over edges at ``u``."""
        return weighted_degrees(self.graph, self.weights)

    def with_weights(self, weights: np.ndarray) -> "AffinityGraphs":
        return AffinityGraphs(self.graph, weights, self.relationship_names)

    def violations(self, epsilon: float = 1e-6, tol: float = 1e-9) -> list[str]:
        """Human-readable list of broken invariants (empty when valid)."""
        w = self.weights
        problems = []
        if not np.all(np.isfinite(w)):
            problems.append("non-finite weight")
            return problems
        if w.size and w.min() < epsilon * (1 - 1e-9):
            problems.append(f"weight {w.min():.3g} below floor {epsilon:g}")
        if w.size and w.max() > 1 + tol:
            problems.append(f"weight {w.max():.17g} above 1")
        if w.size:
            dev = np.abs(w.sum(axis=1) - 1.0).max()
            if dev > tol:
                problems.append(f"edge row sums deviate from 1 by {dev:.3g}")
        return problems


def weighted_degrees(graph: Graph, weights: np.ndarray) -> np.ndarray:
    ends = np.asarray(graph.edge_endpoints, dtype=np.int64).reshape(-1, 2)
    d = np.zeros((graph.node_count, weights.shape[1]))
    np.add.at(d, ends[:, 0], weights)
    np.add.at(d, ends[:, 1], weights)
    return d


def path_probability(path: PathDescriptor, affinity: AffinityGraphs, m: int, alpha: float,
                     degrees: np.ndarray | None = None) -> float:
    """Probability that a decayed random walk follows ``path`` step by step.

    Each step ``u -> v`` contributes ``weights[e_uv, m] / d[u, m]`` and the
    walk is discounted by ``alpha ** length``. ``degrees`` may be passed to
    hold the normalizers fixed.
    """
    if path.length < 1:
        raise ValueError("path probability needs a path with at least one edge")
    if degrees is None:
        degrees = affinity.degrees()
    w = affinity.weights[:, m]
    prob = alpha ** path.length
    for u, e in zip(path.nodes, path.edges):
        prob *= w[e] / degrees[u, m]
    return float(prob)


def pair_closeness(paths: Sequence[PathDescriptor], affinity: AffinityGraphs, m: int, alpha: float,
                   direction: str = "forward", degrees: np.ndarray | None = None) -> float:
    """Reachability between the shared endpoints of ``paths``.

    ``"forward"`` sums the path probabilities as given; ``"mean"`` averages
    that with the sum over the reversed paths.
    """
    if not paths:
        return 0.0
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    ends = {(p.nodes[0], p.nodes[-1]) for p in paths}
    if len(ends) != 1:
        raise ValueError("all paths must share the same endpoints")
    if degrees is None:
        degrees = affinity.degrees()
    fwd = sum(path_probability(p, affinity, m, alpha, degrees) for p in paths)
    if direction == "forward":
        return fwd
    rev = sum(path_probability(p.reversed(), affinity, m, alpha, degrees) for p in paths)
    return 0.5 * (fwd + rev)


def truncation_bound(alpha: float, K: int) -> float:
    """Upper bound ``alpha ** (K + 1)`` on reachability carried by paths longer than ``K``."""
    return float(alpha) ** (int(K) + 1)
