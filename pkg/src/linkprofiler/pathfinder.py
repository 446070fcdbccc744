"""Bounded-length simple path enumeration with bitset path descriptors.

Paths grow breadth-first from a single source, one hop per level. Each path
carries bitsets of its nodes and edges, so "is node j already on the path",
"does the path use edge e" and "is this path already recorded" are single
integer operations regardless of path length.
"""

from __future__ import annotations

import threading
from collections import OrderedDict, defaultdict
from collections.abc import Iterable, Sequence

from .graph import Graph

DEFAULT_CACHE_CAPACITY = 10_000
# below this many uncached sources, worker start-up costs more than it saves
PARALLEL_MIN_SOURCES = 64


class PathDescriptor:
    """A simple path ``nodes[0] - nodes[1] - ... - nodes[-1]``.

    ``node_bits`` / ``edge_bits`` have bit ``u`` / ``e`` set for every node /
    edge on the path. ``width`` is ``(node_count, edge_count)`` of the graph
    the path was built on; descriptors from different graphs do not compare.
    """

    __slots__ = ("node_bits", "edge_bits", "nodes", "edges", "width")

    def __init__(self, node_bits: int, edge_bits: int, nodes: tuple[int, ...],
                 edges: tuple[int, ...], width: tuple[int, int]):
        self.node_bits = node_bits
        self.edge_bits = edge_bits
        self.nodes = nodes
        self.edges = edges
        self.width = width

    @classmethod
    def from_nodes(cls, graph: Graph, nodes: Sequence[int]) -> "PathDescriptor":
        """Build the descriptor of an explicit node sequence, validating it."""
        nodes = tuple(int(u) for u in nodes)
        if not nodes:
            raise ValueError("a path needs at least one node")
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"path {nodes} repeats a node")
        edges = tuple(graph.edge_index(a, b) for a, b in zip(nodes, nodes[1:]))
        node_bits = 0
        for u in nodes:
            node_bits |= 1 << u
        edge_bits = 0
        for e in edges:
            edge_bits |= 1 << e
        return cls(node_bits, edge_bits, nodes, edges, (graph.node_count, graph.edge_count))

    @property
    def length(self) -> int:
        return len(self.nodes) - 1

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    def contains_node(self, u: int) -> bool:
        return (self.node_bits >> u) & 1 == 1

    def contains_edge(self, e: int) -> bool:
        return (self.edge_bits >> e) & 1 == 1

    def reversed(self) -> "PathDescriptor":
        return PathDescriptor(self.node_bits, self.edge_bits, self.nodes[::-1], self.edges[::-1], self.width)

    def _check(self, other: "PathDescriptor"):
        if self.width != other.width:
            raise ValueError("path descriptors belong to different graphs")

    def __eq__(self, other):
        if not isinstance(other, PathDescriptor):
            return NotImplemented
        self._check(other)
        # from a fixed start, a simple path is determined by its edge set
        return (self.edge_bits ^ other.edge_bits) == 0 and self.nodes[0] == other.nodes[0]

    def __hash__(self):
        return hash((self.edge_bits, self.nodes[0]))

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self.nodes), self.nodes)

    def __repr__(self) -> str:
        return f"PathDescriptor({list(self.nodes)})"


def descriptor_contains(desc: PathDescriptor, edge: int) -> bool:
    """Whether ``edge`` lies on the path."""
    return desc.contains_edge(edge)


class PathSet:
    """All simple paths of length at most ``K`` from ``source``, keyed by target."""

    __slots__ = ("source", "K", "_paths")

    def __init__(self, source: int, K: int, paths: dict[int, list[PathDescriptor]]):
        self.source = source
        self.K = K
        self._paths = paths

    def paths_to(self, target: int) -> list[PathDescriptor]:
        return self._paths.get(target, [])

    def by_length(self, target: int) -> dict[int, list[PathDescriptor]]:
        out: dict[int, list[PathDescriptor]] = defaultdict(list)
        for p in self.paths_to(target):
            out[p.length].append(p)
        return dict(out)

    def targets(self) -> list[int]:
        return sorted(t for t, ps in self._paths.items() if ps)

    def __iter__(self):
        for t in self.targets():
            yield from self._paths[t]

    def __len__(self) -> int:
        return sum(len(ps) for ps in self._paths.values())

    def node_sequences(self) -> set[tuple[int, ...]]:
        return {p.nodes for p in self}


def find_paths(graph: Graph, source: int, K: int) -> PathSet:
    """Enumerate every simple path of length 1..K starting at ``source``.

    Level ``k`` extends the paths that reached a node at level ``k-1`` by one
    edge. ``active`` holds the nodes that gained a path on the previous
    level; only those are expanded, and a node drops out once expanded. An
    extension is rejected if the new node is already on the path (so no path
    ever returns to ``source``) or the extended edge set is already recorded
    for that target.
    """
    n = graph.node_count
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range for {n} nodes")
    if K <= 0:
        return PathSet(source, K, {})
    width = (n, graph.edge_count)
    adjacency = graph.adjacency
    # D(I, I) starts with the zero-length path so that level 1 has something to extend
    frontier: dict[int, list[PathDescriptor]] = {
        source: [PathDescriptor(1 << source, 0, (source,), (), width)]
    }
    found: dict[int, list[PathDescriptor]] = defaultdict(list)
    recorded: dict[int, set[int]] = defaultdict(set)
    for _ in range(K):
        active = sorted(frontier)
        gained: dict[int, list[PathDescriptor]] = defaultdict(list)
        for i in active:
            paths_i = frontier[i]
            for j, e in adjacency[i]:
                jbit = 1 << j
                ebit = 1 << e
                seen_j = recorded[j]
                for path in paths_i:
                    if path.node_bits & jbit:
                        continue
                    edge_bits = path.edge_bits | ebit
                    if edge_bits in seen_j:
                        continue
                    seen_j.add(edge_bits)
                    gained[j].append(PathDescriptor(path.node_bits | jbit, edge_bits,
                                                    path.nodes + (j,), path.edges + (e,), width))
        if not gained:
            break
        for j, paths in gained.items():
            found[j].extend(paths)
        frontier = gained
    for paths in found.values():
        paths.sort(key=PathDescriptor.sort_key)
    return PathSet(source, K, dict(found))


class PathCache:
    """Thread-safe LRU cache of :class:`PathSet` objects keyed by ``(source, K)``.

    A capacity of 0 disables storage. The cache binds to the first graph it
    serves and refuses any other.
    """

    def __init__(self, capacity: int = DEFAULT_CACHE_CAPACITY):
        if capacity < 0:
            raise ValueError("cache capacity must be >= 0")
        self.capacity = int(capacity)
        self.hits = 0
        self.misses = 0
        self.evictions = 0
        self._store: OrderedDict[tuple[int, int], PathSet] = OrderedDict()
        self._lock = threading.Lock()
        self._graph: Graph | None = None

    def _bind(self, graph: Graph):
        if self._graph is None:
            self._graph = graph
        elif self._graph is not graph:
            raise ValueError("PathCache is already bound to a different graph")

    def get(self, graph: Graph, source: int, K: int) -> PathSet:
        key = (source, K)
        with self._lock:
            self._bind(graph)
            hit = self._store.get(key)
            if hit is not None:
                self._store.move_to_end(key)
                self.hits += 1
                return hit
            self.misses += 1
        pathset = find_paths(graph, source, K)
        self.put(pathset)
        return pathset

    def put(self, pathset: PathSet):
        if self.capacity == 0:
            return
        key = (pathset.source, pathset.K)
        with self._lock:
            self._store[key] = pathset
            self._store.move_to_end(key)
            while len(self._store) > self.capacity:
                self._store.popitem(last=False)
                self.evictions += 1

    def __contains__(self, key) -> bool:
        return key in self._store

    def __len__(self) -> int:
        return len(self._store)

    def stats(self) -> dict[str, int]:
        return {"hits": self.hits, "misses": self.misses, "evictions": self.evictions,
                "size": len(self._store), "capacity": self.capacity}


def pair_source(graph: Graph, i: int, j: int) -> int:
    """Endpoint to enumerate from: the lower-degree one, ties to the lower index."""
    di, dj = graph.degree[i], graph.degree[j]
    if di != dj:
        return i if di < dj else j
    return min(i, j)


def _oriented(paths: Iterable[PathDescriptor], start: int) -> list[PathDescriptor]:
    out = [p if p.nodes[0] == start else p.reversed() for p in paths]
    out.sort(key=PathDescriptor.sort_key)
    return out


def pair_paths(graph: Graph, i: int, j: int, K: int, cache: PathCache | None = None) -> list[PathDescriptor]:
    """All simple paths of length <= ``K`` from ``i`` to ``j``, sorted by (length, nodes)."""
    if i == j:
        raise ValueError("pair_paths needs two distinct nodes")
    src = pair_source(graph, i, j)
    dst = j if src == i else i
    pathset = cache.get(graph, src, K) if cache is not None else find_paths(graph, src, K)
    return _oriented(pathset.paths_to(dst), i)


def _paths_from_source(graph: Graph, source: int, K: int, targets: Sequence[int]):
    ps = find_paths(graph, source, K)
    return ps, [ps.paths_to(t) for t in targets]


def collect_pair_paths(
    graph: Graph,
    pairs: Iterable[tuple[int, int]],
    K: int,
    cache: PathCache | None = None,
    n_jobs: int | None = 1,
) -> dict[tuple[int, int], list[PathDescriptor]]:
    """Paths for many unordered pairs ``(i, j)``, oriented from ``i`` to ``j``.

    Pairs are grouped by enumeration source so each source is expanded at
    most once. With ``n_jobs != 1`` uncached sources are expanded in worker
    processes; results do not depend on ``n_jobs`` or on the cache.
    """
    by_source: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for i, j in pairs:
        if i == j:
            raise ValueError("pairs must join two distinct nodes")
        by_source[pair_source(graph, i, j)].append((i, j))
    sources = sorted(by_source)
    out: dict[tuple[int, int], list[PathDescriptor]] = {}

    def emit(src, paths_per_target):
        for (i, j), paths in zip(by_source[src], paths_per_target):
            out[(i, j)] = _oriented(paths, i)

    pending = sources
    if cache is not None:
        pending = []
        for src in sources:
            if (src, K) in cache:
                ps = cache.get(graph, src, K)
                emit(src, [ps.paths_to(j if i == src else i) for i, j in by_source[src]])
            else:
                pending.append(src)

    if n_jobs is not None and n_jobs != 1 and len(pending) >= PARALLEL_MIN_SOURCES:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(
            delayed(_paths_from_source)(graph, s, K, [j if i == s else i for i, j in by_source[s]])
            for s in pending
        )
        for src, (ps, per_target) in zip(pending, results):
            if cache is not None:
                with cache._lock:
                    cache._bind(graph)
                    cache.misses += 1
                cache.put(ps)
            emit(src, per_target)
    else:
        for src in pending:
            ps = cache.get(graph, src, K) if cache is not None else find_paths(graph, src, K)
            emit(src, [ps.paths_to(j if i == src else i) for i, j in by_source[src]])
    return out
