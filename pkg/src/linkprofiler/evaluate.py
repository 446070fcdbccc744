"""Thresholded predictions, precision/recall/F1 and coverage diagnostics."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .closeness import AffinityGraphs
from .exceptions import InputError
from .graph import Graph


class UnknownEdgesError(InputError):
    """Label records that name node pairs which are not edges of the graph."""

    def __init__(self, edges, path=None):
        self.edges = list(edges)
        shown = ", ".join(f"{a}-{b}" for a, b in self.edges[:20])
        more = "" if len(self.edges) <= 20 else f" (+{len(self.edges) - 20} more)"
        super().__init__(f"labels reference {len(self.edges)} unknown edge(s): {shown}{more}", path=path)


@dataclass(frozen=True)
class PredictionSet:
    """``predicted[e, m]`` is True when edge ``e`` is assigned relationship ``m``."""

    predicted: np.ndarray
    thresholds: tuple[float, ...]

    @property
    def M(self) -> int:
        return self.predicted.shape[1]


@dataclass(frozen=True)
class LabelSet:
    """Gold relationships for a subset of edges; an edge may carry several."""

    labels: Mapping[int, frozenset[int]]
    relationship_names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float
    no_predictions: bool = False


def threshold_predictions(affinity: AffinityGraphs | np.ndarray, thetas: Sequence[float]) -> PredictionSet:
    """Assign relationship ``m`` to every edge whose probability reaches ``thetas[m]``."""
    w = affinity.weights if isinstance(affinity, AffinityGraphs) else np.asarray(affinity, dtype=float)
    thetas = tuple(float(t) for t in thetas)
    if len(thetas) != w.shape[1]:
        raise ValueError(f"expected {w.shape[1]} thresholds, got {len(thetas)}")
    if any(not 0.0 <= t <= 1.0 for t in thetas):
        raise ValueError("thresholds must lie in [0, 1]")
    return PredictionSet(w >= np.asarray(thetas)[None, :], thetas)


def score_prf(pred: PredictionSet, gold: LabelSet, m: int) -> PRF:
    """Precision, recall and F1 for relationship ``m`` over the labeled edges."""
    tp = fp = fn = 0
    for e, rels in gold.labels.items():
        hit = bool(pred.predicted[e, m])
        truth = m in rels
        tp += hit and truth
        fp += hit and not truth
        fn += truth and not hit
    if tp + fn == 0:
        raise ValueError(f"no gold positives for relationship {m}")
    if tp + fp == 0:
        return PRF(0.0, 0.0, 0.0, True)
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    f1 = 0.0 if tp == 0 else 2 * precision * recall / (precision + recall)
    return PRF(precision, recall, f1)


def systematicness_completeness(pred: PredictionSet, graph: Graph | None = None) -> tuple[float, float]:
    """``S = P / E`` (edges with any relationship) and ``C = Mu / P`` (of those, edges with two or more)."""
    counts = pred.predicted.sum(axis=1)
    E = graph.edge_count if graph is not None else pred.predicted.shape[0]
    profiled = int(np.count_nonzero(counts >= 1))
    multiple = int(np.count_nonzero(counts >= 2))
    S = profiled / E if E else 0.0
    C = multiple / profiled if profiled else 0.0
    return S, C


def evaluation_report(pred: PredictionSet, gold: LabelSet | None, graph: Graph | None = None) -> dict:
    """Machine-readable summary of every metric."""
    out: dict = {"thresholds": list(pred.thresholds), "relationships": {}}
    names = gold.relationship_names if gold is not None else tuple(f"rel_{m}" for m in range(pred.M))
    if gold is not None:
        for m, name in enumerate(names):
            try:
                prf = score_prf(pred, gold, m)
            except ValueError:
                out["relationships"][name] = None
                continue
            out["relationships"][name] = prf._asdict()
    S, C = systematicness_completeness(pred, graph)
    out["systematicness"] = S
    out["completeness"] = C
    return out


def format_report(report: dict) -> str:
    lines = [f"{'relationship':<16}{'precision':>10}{'recall':>10}{'F1':>10}"]
    for name, prf in report["relationships"].items():
        if prf is None:
            lines.append(f"{name:<16}{'n/a':>10}{'n/a':>10}{'n/a':>10}")
        else:
            flag = "  (no predictions)" if prf["no_predictions"] else ""
            lines.append(f"{name:<16}{prf['precision']:>10.4f}{prf['recall']:>10.4f}{prf['f1']:>10.4f}{flag}")
    lines.append("")
    lines.append(f"systematicness S = {100 * report['systematicness']:.1f}%")
    lines.append(f"completeness   C = {100 * report['completeness']:.1f}%")
    return "\n".join(lines)


def read_labels(path: str | Path, graph: Graph, relationship_names: Sequence[str]) -> LabelSet:
    """Parse ``id_u <TAB> id_v <TAB> rel[,rel...]`` records."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read label file: {exc.strerror}", path=path) from exc
    name_to_m = {name: m for m, name in enumerate(relationship_names)}
    labels: dict[int, set[int]] = {}
    unknown = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 3:
            raise InputError(f"expected 3 tab-separated fields, got {len(parts)}", path=path, line=lineno)
        a, b, rels = (p.strip() for p in parts)
        ms = set()
        for r in filter(None, (x.strip() for x in rels.split(","))):
            if r not in name_to_m:
                raise InputError(f"unknown relationship {r!r}", path=path, line=lineno)
            ms.add(name_to_m[r])
        if not (graph.has_node(a) and graph.has_node(b)) or not graph.has_edge(graph.index_of(a), graph.index_of(b)):
            unknown.append((a, b))
            continue
        e = graph.edge_index(graph.index_of(a), graph.index_of(b))
        labels.setdefault(e, set()).update(ms)
    if unknown:
        raise UnknownEdgesError(unknown, path=path)
    if not labels:
        raise InputError("label file contains no labels", path=path)
    return LabelSet({e: frozenset(s) for e, s in labels.items()}, tuple(relationship_names))
