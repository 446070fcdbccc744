"""Command line entry point: ``linkprofiler {profile,eval,paths}``.

Exit codes: 0 success, 1 unreadable or malformed input, 2 invalid
configuration, 3 degenerate run (nothing to optimize, or labels naming
edges that do not exist).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .closeness import DIRECTIONS
from .evaluate import (UnknownEdgesError, evaluation_report, format_report, read_labels,
                       threshold_predictions)
from .exceptions import ConfigError, DegenerateRunError, InputError
from .graph import IngestReport, read_attribute_file, read_edge_file
from .io import load_config, read_affinity, write_affinity
from .optimizer import FitConfig, fit
from .pathfinder import PathCache, find_paths
from .similarity import compute_similarity_pairs

logger = logging.getLogger("linkprofiler")

EXIT_INPUT = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


def _run_profile(args) -> int:
    cfg = load_config(args.config)
    if args.direction:
        cfg.direction = args.direction
    deterministic = args.deterministic or cfg.deterministic
    fit_cfg = FitConfig(step_size=cfg.step_size, max_iter=cfg.max_iters, tol=cfg.tol, K=cfg.K,
                        alpha=cfg.alpha, direction=cfg.direction, epsilon=cfg.epsilon,
                        deterministic=deterministic, n_jobs=args.threads)
    M = len(cfg.relationships)
    if M * cfg.epsilon > 1:
        raise ConfigError(f"{M} relationships x epsilon {cfg.epsilon:g} exceeds 1")

    ingest = IngestReport()
    graph = read_edge_file(args.edges, report=ingest)
    table = read_attribute_file(graph, cfg.relationships, args.attrs)
    logger.info("loaded %d nodes, %d edges (%d duplicate line(s) collapsed)",
                graph.node_count, graph.edge_count, ingest.duplicate_edges)
    pairs = compute_similarity_pairs(table, graph, K=cfg.K)
    if len(pairs) == 0:
        raise DegenerateRunError("no constrained pairs: no two nodes share attribute values")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.dump_pairs:
        pairs.write(out / "pairs.tsv", graph)
    cache = PathCache(cfg.cache_capacity)
    affinity, report = fit(graph, pairs, fit_cfg, cache=cache)
    if report.stop_reason == "no_pairs":
        raise DegenerateRunError("every constrained pair is further apart than K hops")

    write_affinity(out, affinity)
    thetas = [cfg.thresholds[n] for n in affinity.relationship_names]
    pred = threshold_predictions(affinity, thetas)
    with open(out / "predictions.tsv", "w") as fh:
        fh.write("id_u\tid_v\t" + "\t".join(affinity.relationship_names) + "\n")
        for e in range(graph.edge_count):
            a, b = graph.edge_ids(e)
            fh.write(f"{a}\t{b}\t" + "\t".join(str(int(x)) for x in pred.predicted[e]) + "\n")
    (out / "fit_log.tsv").write_text("\n".join(report.log_lines()) + "\n")
    payload = report.to_dict()
    if deterministic:
        payload.pop("timings")
    else:
        payload["timings"] = {k: round(v, 6) for k, v in payload["timings"].items()}
    payload["ingest"] = {"duplicate_edges": ingest.duplicate_edges,
                         "unknown_nodes": table.report.unknown_nodes,
                         "unknown_attributes": table.report.unknown_attributes}
    (out / "fit_report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    print(f"truncation bound: paths longer than K={cfg.K} carry at most "
          f"alpha^(K+1) = {report.truncation_bound:.6g} of the reachability")
    print(f"fit: {report.n_iter} iteration(s), stop={report.stop_reason}, "
          f"J={report.objective[-1]:.6f}, skipped pairs={report.skipped_pairs}")
    print(f"wrote {M} affinity graph(s) to {out}")
    return 0


def _run_eval(args) -> int:
    affinity = read_affinity(args.affinity)
    names = affinity.relationship_names
    if args.thresholds:
        thetas = [float(x) for x in args.thresholds.split(",")]
        if len(thetas) != len(names):
            raise ConfigError(f"{len(names)} thresholds expected, got {len(thetas)}")
    elif args.config:
        cfg = load_config(args.config)
        try:
            thetas = [cfg.thresholds[n] for n in names]
        except KeyError as exc:
            raise ConfigError(f"config has no threshold for relationship {exc.args[0]!r}") from None
    else:
        thetas = [0.5] * len(names)
    try:
        pred = threshold_predictions(affinity, thetas)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    labels = read_labels(args.labels, affinity.graph, names)
    report = evaluation_report(pred, labels, affinity.graph)
    print(format_report(report))
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def _run_paths(args) -> int:
    graph = read_edge_file(args.edges)
    if not graph.has_node(args.source):
        raise InputError(f"source {args.source!r} is not a node of {args.edges}")
    if args.k < 0:
        raise ConfigError("--k must be >= 0")
    ps = find_paths(graph, graph.index_of(args.source), args.k)
    rows = sorted((tuple(graph.node_ids[u] for u in p.nodes) for p in ps), key=lambda s: (len(s), s))
    for seq in rows:
        print(",".join(seq))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkprofiler",
                                     description="Profile relationship semantics of graph edges.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="learn one affinity graph per relationship")
    p.add_argument("--edges", required=True, help="edge list file")
    p.add_argument("--attrs", required=True, help="node<TAB>attribute<TAB>value file")
    p.add_argument("--config", required=True, help="YAML/JSON run configuration")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker processes for path enumeration (default: all cores)")
    p.add_argument("--deterministic", action="store_true",
                   help="omit wall-clock timings so repeated runs are byte-identical")
    p.add_argument("--direction", choices=DIRECTIONS, help="override the config's direction mode")
    p.add_argument("--dump-pairs", action="store_true", help="also write constrained pairs to pairs.tsv")
    p.set_defaults(func=_run_profile)

    e = sub.add_parser("eval", help="score an affinity file against edge labels")
    e.add_argument("--affinity", required=True, help="combined affinity.tsv from 'profile'")
    e.add_argument("--labels", required=True, help="id_u<TAB>id_v<TAB>rel[,rel] file")
    e.add_argument("--thresholds", help="comma-separated threshold per relationship")
    e.add_argument("--config", help="take thresholds from this configuration")
    e.add_argument("--report", help="write the metrics as JSON here")
    e.set_defaults(func=_run_eval)

    q = sub.add_parser("paths", help="debug: list simple paths from one node")
    q.add_argument("--edges", required=True)
    q.add_argument("--source", required=True)
    q.add_argument("--k", type=int, default=3)
    q.set_defaults(func=_run_paths)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UnknownEdgesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateRunError as exc:
        print(f"degenerate run: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
