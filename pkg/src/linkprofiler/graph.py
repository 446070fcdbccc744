"""Undirected simple graphs and per-relationship node attribute tables."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import InputError

logger = logging.getLogger(__name__)

CATEGORICAL = "categorical"
NUMERICAL = "numerical"


@dataclass
class IngestReport:
    """Counters for records that were tolerated but not used."""

    duplicate_edges: int = 0
    unknown_nodes: int = 0
    unknown_attributes: int = 0
    overwritten_values: int = 0

    @property
    def warnings(self) -> int:
        return self.unknown_nodes + self.unknown_attributes + self.overwritten_values


class Graph:
    """Immutable undirected simple graph over dense node indices.

    Nodes are numbered ``0..node_count-1`` in order of first appearance and
    edges ``0..edge_count-1``; ``edge_endpoints[e] = (u, v)`` with ``u < v``.
    ``adjacency[u]`` is a tuple of ``(neighbor, edge)`` sorted by neighbor.
    """

    __slots__ = ("node_ids", "adjacency", "edge_endpoints", "_index", "_edge_lookup", "_degree", "_given")

    def __init__(self, node_ids: Sequence[str], edges: Sequence[tuple[int, int]]):
        n = len(node_ids)
        self.node_ids = tuple(node_ids)
        self._index = {name: i for i, name in enumerate(self.node_ids)}
        if len(self._index) != n:
            raise ValueError("node ids must be unique")
        endpoints = []
        given = []
        lookup = {}
        nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            given.append((u, v))
            if u > v:
                u, v = v, u
            if (u, v) in lookup:
                raise ValueError(f"duplicate edge ({u}, {v})")
            e = len(endpoints)
            lookup[(u, v)] = e
            endpoints.append((u, v))
            nbrs[u].append((v, e))
            nbrs[v].append((u, e))
        self.edge_endpoints = tuple(endpoints)
        self._given = tuple(given)
        self.adjacency = tuple(tuple(sorted(row)) for row in nbrs)
        self._edge_lookup = lookup
        self._degree = np.array([len(row) for row in self.adjacency], dtype=np.int64)

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    @property
    def edge_count(self) -> int:
        return len(self.edge_endpoints)

    @property
    def degree(self) -> np.ndarray:
        return self._degree

    def index_of(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._index

    def neighbors(self, u: int) -> tuple[int, ...]:
        return tuple(v for v, _ in self.adjacency[u])

    def edge_index(self, u: int, v: int) -> int:
        """Index of the edge joining ``u`` and ``v`` (order-insensitive)."""
        key = (u, v) if u < v else (v, u)
        try:
            return self._edge_lookup[key]
        except KeyError:
            raise KeyError(f"no edge between {u} and {v}") from None

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_lookup

    def edge_ids(self, e: int) -> tuple[str, str]:
        """External ids of edge ``e``, in the orientation it was first given."""
        u, v = self._given[e]
        return self.node_ids[u], self.node_ids[v]

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


def build_graph(
    edge_lines: Iterable[tuple[str, str]],
    line_numbers: Sequence[int] | None = None,
    report: IngestReport | None = None,
) -> Graph:
    """Build a :class:`Graph` from pairs of external node ids.

    Dense indices follow first appearance. Repeated edges (in either
    orientation) are collapsed and counted in ``report``. Self-loops raise
    :class:`InputError` naming the offending line; ``line_numbers`` maps
    each pair to its source line (default: 1-based position).
    """
    report = report if report is not None else IngestReport()
    index: dict[str, int] = {}
    names: list[str] = []
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for pos, (a, b) in enumerate(edge_lines):
        a, b = str(a), str(b)
        if a == b:
            line = line_numbers[pos] if line_numbers is not None else pos + 1
            raise InputError(f"self-loop at line {line} (node {a!r})", line=line)
        ids = []
        for name in (a, b):
            if name not in index:
                index[name] = len(names)
                names.append(name)
            ids.append(index[name])
        key = (min(ids), max(ids))
        if key in seen:
            report.duplicate_edges += 1
            continue
        seen.add(key)
        edges.append((ids[0], ids[1]))
    if not edges:
        raise InputError("empty graph")
    return Graph(names, edges)


def read_edge_file(path: str | Path, report: IngestReport | None = None) -> Graph:
    """Parse a whitespace-separated edge list; ``#`` lines are comments."""
    path = Path(path)
    pairs = []
    linenos = []
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read edge file: {exc.strerror}", path=path) from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise InputError(f"expected two node ids, got {len(tokens)} fields", path=path, line=lineno)
        pairs.append((tokens[0], tokens[1]))
        linenos.append(lineno)
    try:
        return build_graph(pairs, line_numbers=linenos, report=report)
    except InputError as exc:
        raise InputError(str(exc), path=path, line=exc.line) from None


@dataclass(frozen=True)
class RelationshipSpec:
    """Attributes that indicate one relationship."""

    name: str
    categorical: tuple[str, ...] = ()
    numerical: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.categorical and not self.numerical:
            raise ValueError(f"relationship {self.name!r} declares no attributes")
        overlap = set(self.categorical) & set(self.numerical)
        if overlap:
            raise ValueError(f"attribute(s) {sorted(overlap)} declared both categorical and numerical")

    @property
    def attributes(self) -> tuple[str, ...]:
        return self.categorical + self.numerical


def parse_attribute_spec(raw: Mapping[str, Mapping[str, str] | Sequence[str]]) -> tuple[RelationshipSpec, ...]:
    """Turn ``{rel: {attr: kind}}`` into relationship specs.

    A bare list of attribute names is shorthand for all-categorical.
    """
    specs = []
    for name, attrs in raw.items():
        if isinstance(attrs, Mapping):
            cat, num = [], []
            for attr, kind in attrs.items():
                kind = str(kind).lower()
                if kind == CATEGORICAL:
                    cat.append(str(attr))
                elif kind == NUMERICAL:
                    num.append(str(attr))
                else:
                    raise ValueError(f"attribute {attr!r}: unknown kind {kind!r}")
            specs.append(RelationshipSpec(str(name), tuple(cat), tuple(num)))
        else:
            specs.append(RelationshipSpec(str(name), tuple(str(a) for a in attrs)))
    if not specs:
        raise ValueError("attribute spec declares no relationships")
    kinds: dict[str, str] = {}
    for rel in specs:
        for a in rel.categorical:
            if kinds.setdefault(a, CATEGORICAL) != CATEGORICAL:
                raise ValueError(f"attribute {a!r} has conflicting kinds")
        for a in rel.numerical:
            if kinds.setdefault(a, NUMERICAL) != NUMERICAL:
                raise ValueError(f"attribute {a!r} has conflicting kinds")
    return tuple(specs)


@dataclass
class AttributeTable:
    """Node attribute values, keyed by attribute name.

    ``categorical[attr][u]`` is a frozenset (empty when missing);
    ``numerical[attr][u]`` is a float (NaN when missing). ``max_diff[attr]``
    is the largest pairwise difference among present values of a numerical
    attribute.
    """

    relationships: tuple[RelationshipSpec, ...]
    categorical: dict[str, list[frozenset]]
    numerical: dict[str, np.ndarray]
    max_diff: dict[str, float]
    report: IngestReport = field(default_factory=IngestReport)

    @property
    def relationship_count(self) -> int:
        return len(self.relationships)

    @property
    def relationship_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relationships)

    @property
    def node_count(self) -> int:
        for values in self.categorical.values():
            return len(values)
        for values in self.numerical.values():
            return len(values)
        return 0

    def has_value(self, attr: str, u: int) -> bool:
        if attr in self.categorical:
            return bool(self.categorical[attr][u])
        return not math.isnan(self.numerical[attr][u])

    def is_attributed(self, u: int, m: int) -> bool:
        """True if node ``u`` carries any value for relationship ``m``."""
        return any(self.has_value(a, u) for a in self.relationships[m].attributes)


def load_attributes(
    graph: Graph,
    spec: Sequence[RelationshipSpec] | Mapping,
    lines: Iterable[tuple[str, str, str]],
    line_numbers: Sequence[int] | None = None,
    path: str | Path | None = None,
) -> AttributeTable:
    """Ingest ``(node_id, attribute, value)`` records against ``spec``.

    Unknown nodes and undeclared attributes are skipped and counted in
    ``table.report``. Repeated records for a categorical attribute grow the
    node's value set; a repeated numerical record replaces the earlier one.
    """
    if isinstance(spec, Mapping):
        spec = parse_attribute_spec(spec)
    spec = tuple(spec)
    n = graph.node_count
    cat_names = {a for r in spec for a in r.categorical}
    num_names = {a for r in spec for a in r.numerical}
    cat_sets: dict[str, list[set]] = {a: [set() for _ in range(n)] for a in sorted(cat_names)}
    numerical = {a: np.full(n, np.nan) for a in sorted(num_names)}
    report = IngestReport()

    for pos, (node, attr, value) in enumerate(lines):
        line = line_numbers[pos] if line_numbers is not None else pos + 1
        if attr not in cat_names and attr not in num_names:
            report.unknown_attributes += 1
            continue
        if not graph.has_node(node):
            report.unknown_nodes += 1
            continue
        u = graph.index_of(node)
        if attr in cat_names:
            cat_sets[attr][u].add(value)
            continue
        try:
            x = float(value)
        except ValueError:
            raise InputError(f"non-numeric value {value!r} for numerical attribute {attr!r}",
                             path=path, line=line) from None
        if not math.isfinite(x):
            raise InputError(f"non-finite value {value!r} for numerical attribute {attr!r}",
                             path=path, line=line)
        if not math.isnan(numerical[attr][u]):
            report.overwritten_values += 1
        numerical[attr][u] = x

    if report.warnings:
        logger.warning("attribute ingest skipped %d unknown node record(s), %d undeclared attribute "
                       "record(s); %d numerical value(s) overwritten",
                       report.unknown_nodes, report.unknown_attributes, report.overwritten_values)

    max_diff = {}
    for attr, values in numerical.items():
        present = values[~np.isnan(values)]
        max_diff[attr] = float(present.max() - present.min()) if present.size else 0.0

    categorical = {a: [frozenset(s) for s in sets] for a, sets in cat_sets.items()}
    return AttributeTable(spec, categorical, numerical, max_diff, report)


def read_attribute_file(graph: Graph, spec, path: str | Path) -> AttributeTable:
    """Parse a ``node <TAB> attribute <TAB> value`` file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read attribute file: {exc.strerror}", path=path) from exc
    records, linenos = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 3:
            raise InputError(f"expected 3 tab-separated fields, got {len(parts)}", path=path, line=lineno)
        records.append((parts[0].strip(), parts[1].strip(), parts[2].strip()))
        linenos.append(lineno)
    return load_attributes(graph, spec, records, line_numbers=linenos, path=path)
