"""Reading and writing affinity graphs and run configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .closeness import AffinityGraphs
from .exceptions import ConfigError, InputError
from .graph import Graph, RelationshipSpec, build_graph, parse_attribute_spec
from .pathfinder import DEFAULT_CACHE_CAPACITY

COMBINED_FILE = "affinity.tsv"
CACHE_ENV_VAR = "LINKPROFILER_CACHE_CAPACITY"


def format_weight(x: float) -> str:
    return f"{x:.12g}"


def write_affinity(out_dir: str | Path, affinity: AffinityGraphs) -> list[Path]:
    """Write ``rel_<m>.tsv`` per relationship plus the combined ``affinity.tsv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph = affinity.graph
    ids = [graph.edge_ids(e) for e in range(graph.edge_count)]
    written = []
    for m in range(affinity.M):
        path = out_dir / f"rel_{m}.tsv"
        with open(path, "w") as fh:
            for (a, b), w in zip(ids, affinity.weights[:, m]):
                fh.write(f"{a}\t{b}\t{format_weight(w)}\n")
        written.append(path)
    path = out_dir / COMBINED_FILE
    with open(path, "w") as fh:
        fh.write("id_u\tid_v\t" + "\t".join(affinity.relationship_names) + "\n")
        for (a, b), row in zip(ids, affinity.weights):
            fh.write(f"{a}\t{b}\t" + "\t".join(format_weight(w) for w in row) + "\n")
    written.append(path)
    return written


def read_affinity(path: str | Path) -> AffinityGraphs:
    """Load a combined affinity file; edge order follows the file."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read affinity file: {exc.strerror}", path=path) from exc
    if not lines:
        raise InputError("empty affinity file", path=path)
    header = lines[0].split("\t")
    if len(header) < 3 or header[:2] != ["id_u", "id_v"]:
        raise InputError("missing 'id_u<TAB>id_v<TAB>...' header", path=path, line=1)
    names = header[2:]
    pairs, rows, linenos = [], [], []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != len(header):
            raise InputError(f"expected {len(header)} fields, got {len(parts)}", path=path, line=lineno)
        try:
            rows.append([float(x) for x in parts[2:]])
        except ValueError:
            raise InputError("non-numeric weight", path=path, line=lineno) from None
        pairs.append((parts[0], parts[1]))
        linenos.append(lineno)
    try:
        graph = build_graph(pairs, line_numbers=linenos)
    except InputError as exc:
        raise InputError(str(exc), path=path, line=exc.line) from None
    if graph.edge_count != len(rows):
        raise InputError("affinity file lists an edge twice", path=path)
    return AffinityGraphs(graph, np.asarray(rows), names)


def read_relationship_file(path: str | Path) -> dict[tuple[str, str], float]:
    """Load a single ``rel_<m>.tsv`` as ``{(id_u, id_v): weight}``."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        if not raw.strip():
            continue
        a, b, w = raw.split("\t")
        out[(a, b)] = float(w)
    return out


@dataclass
class ProfileConfig:
    relationships: tuple[RelationshipSpec, ...]
    K: int = 3
    alpha: float = 0.8
    thresholds: dict[str, float] = field(default_factory=dict)
    step_size: float = 0.05
    max_iters: int = 100
    tol: float = 1e-6
    epsilon: float = 1e-6
    cache_capacity: int = DEFAULT_CACHE_CAPACITY
    direction: str = "mean"
    deterministic: bool = False

    @property
    def relationship_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relationships)


# default thresholds: 0.4 / 0.7 for the first two relationships
_DEFAULT_THRESHOLDS = (0.4, 0.7)

_KNOWN_KEYS = {"relationships", "K", "alpha", "thresholds", "step_size", "max_iters", "tol",
               "epsilon", "cache_capacity", "direction", "deterministic"}


def load_config(path: str | Path) -> ProfileConfig:
    """Parse a YAML (or JSON) run configuration."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read config file: {exc.strerror}", path=path) from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML/JSON: {exc}") from None
    return config_from_dict(raw, source=str(path))


def config_from_dict(raw, source: str = "config") -> ProfileConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{source}: unknown key(s) {sorted(unknown)}")
    if "relationships" not in raw:
        raise ConfigError(f"{source}: 'relationships' is required")
    try:
        rels = parse_attribute_spec(raw["relationships"])
        names = [r.name for r in rels]
        cfg = ProfileConfig(
            relationships=rels,
            K=int(raw.get("K", 3)),
            alpha=float(raw.get("alpha", 0.8)),
            step_size=float(raw.get("step_size", 0.05)),
            max_iters=int(raw.get("max_iters", 100)),
            tol=float(raw.get("tol", 1e-6)),
            epsilon=float(raw.get("epsilon", 1e-6)),
            cache_capacity=int(raw.get("cache_capacity", DEFAULT_CACHE_CAPACITY)),
            direction=str(raw.get("direction", "mean")),
            deterministic=bool(raw.get("deterministic", False)),
        )
        th = raw.get("thresholds")
        if th is None:
            th = {n: (_DEFAULT_THRESHOLDS[m] if m < len(_DEFAULT_THRESHOLDS) else 0.5)
                  for m, n in enumerate(names)}
        elif isinstance(th, (list, tuple)):
            if len(th) != len(names):
                raise ConfigError(f"{source}: {len(names)} thresholds expected, got {len(th)}")
            th = dict(zip(names, th))
        elif isinstance(th, (int, float)):
            th = {n: th for n in names}
        missing = set(names) - set(th)
        if missing:
            raise ConfigError(f"{source}: no threshold for {sorted(missing)}")
        cfg.thresholds = {n: float(th[n]) for n in names}
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{source}: {exc}") from None
    if any(not 0 <= t <= 1 for t in cfg.thresholds.values()):
        raise ConfigError(f"{source}: thresholds must lie in [0, 1]")
    if cfg.cache_capacity < 0:
        raise ConfigError(f"{source}: cache_capacity must be >= 0")
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        try:
            cfg.cache_capacity = int(env)
        except ValueError:
            raise ConfigError(f"{CACHE_ENV_VAR}={env!r} is not an integer") from None
        if cfg.cache_capacity < 0:
            raise ConfigError(f"{CACHE_ENV_VAR} must be >= 0")
    return cfg
