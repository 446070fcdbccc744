"""Gradient ascent on the path-reachability log-likelihood.

The objective for relationship weights ``W`` (edges x relationships) is::

    J(W) = sum_m sum_(i,j) f_m(i, j) * log closeness_m(i, j)

over constrained pairs, where closeness is the decayed random-walk
reachability through all simple paths of length <= K. Each edge row of
``W`` is kept on the probability simplex (floored at ``epsilon``) by
projecting after every ascent step.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Mapping, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse

from .closeness import AffinityGraphs, ClosenessConfig, truncation_bound, weighted_degrees
from .exceptions import ConfigError
from .graph import Graph
from .pathfinder import PathCache, PathDescriptor, collect_pair_paths
from .similarity import SimilarityPairs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitConfig:
    step_size: float = 0.05
    max_iter: int = 100
    tol: float = 1e-6
    K: int = 3
    alpha: float = 0.8
    direction: str = "mean"
    epsilon: float = 1e-6
    max_halvings: int = 10
    init: str = "uniform"
    random_state: int | None = None
    deterministic: bool = True
    n_jobs: int | None = 1

    def __post_init__(self):
        if not self.step_size > 0:
            raise ConfigError("step_size must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError("max_iter must be a positive integer")
        if not self.tol >= 0:
            raise ConfigError("tol must be non-negative")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if self.max_halvings < 0:
            raise ConfigError("max_halvings must be >= 0")
        if self.init not in ("uniform", "random"):
            raise ConfigError(f"init must be 'uniform' or 'random', got {self.init!r}")
        ClosenessConfig(self.K, self.alpha, self.direction)

    @property
    def closeness(self) -> ClosenessConfig:
        return ClosenessConfig(self.K, self.alpha, self.direction)


@dataclass
class FitReport:
    objective: list[float] = field(default_factory=list)
    steps: list[float] = field(default_factory=list)
    n_iter: int = 0
    converged: bool = False
    stop_reason: str = ""
    truncation_bound: float = 0.0
    constrained_pairs: list[int] = field(default_factory=list)
    skipped_pairs: list[int] = field(default_factory=list)
    n_paths: int = 0
    timings: dict[str, float] = field(default_factory=dict)
    cache: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def log_lines(self) -> list[str]:
        lines = [f"# truncation_bound\t{self.truncation_bound:.12g}",
                 f"# constrained_pairs\t{','.join(map(str, self.constrained_pairs))}",
                 f"# skipped_pairs\t{','.join(map(str, self.skipped_pairs))}",
                 f"# stop_reason\t{self.stop_reason}",
                 "iteration\tobjective\tstep"]
        for t, J in enumerate(self.objective):
            step = self.steps[t - 1] if t > 0 else 0.0
            lines.append(f"{t}\t{J:.12g}\t{step:.6g}")
        return lines


def project_simplex(weights: np.ndarray, epsilon: float = 0.0) -> np.ndarray:
    """Euclidean projection of each row onto ``{x : x >= epsilon, sum(x) = 1}``.

    Accepts a single row or a 2-D array of rows.
    """
    x = np.asarray(weights, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    M = x.shape[1]
    if M * epsilon > 1:
        raise ConfigError(f"M * epsilon = {M * epsilon:g} exceeds 1; floor is infeasible")
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot project non-finite weights")
    if M == 1:
        out = np.ones_like(x)
        return out[0] if single else out
    mass = 1.0 - M * epsilon
    y = x - epsilon
    u = -np.sort(-y, axis=1)
    css = np.cumsum(u, axis=1) - mass
    ks = np.arange(1, M + 1)
    rho = np.count_nonzero(u - css / ks > 0, axis=1)
    theta = css[np.arange(len(y)), rho - 1] / rho
    out = np.maximum(y - theta[:, None], 0.0) + epsilon
    return out[0] if single else out


class PathIndex:
    """Flattened paths of all constrained pairs, for vectorized J and gradient.

    Rows of the padded arrays are paths; pad slots point at a dummy edge and
    a dummy node whose weight and degree are 1, so they drop out of products.
    """

    def __init__(self, graph: Graph, pairs: SimilarityPairs,
                 paths: Mapping[tuple[int, int], Sequence[PathDescriptor]], K: int):
        self.graph = graph
        self.M = pairs.relationship_count
        E, N = graph.edge_count, graph.node_count
        pair_ids: dict[tuple[int, int], int] = {}
        pair_of_path, lengths, edge_rows, fwd_rows, rev_rows = [], [], [], [], []
        for key in pairs.unique_pairs():
            plist = paths.get(key, ())
            if not plist:
                continue
            q = pair_ids[key] = len(pair_ids)
            for p in plist:
                if p.length > K:
                    raise ValueError(f"path {p} longer than K={K}")
                if {p.nodes[0], p.nodes[-1]} != set(key):
                    raise ValueError(f"path {p} does not join pair {key}")
                pad = K - p.length
                pair_of_path.append(q)
                lengths.append(p.length)
                edge_rows.append(p.edges + (E,) * pad)
                # forward steps leave nodes[0..k-1], reverse steps leave nodes[1..k]
                fwd_rows.append(p.nodes[:-1] + (N,) * pad)
                rev_rows.append(p.nodes[1:] + (N,) * pad)
        P = len(lengths)
        Q = len(pair_ids)
        self.pair_ids = pair_ids
        self.n_paths = P
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.edges = np.asarray(edge_rows, dtype=np.int64).reshape(P, K)
        self.fwd_origin = np.asarray(fwd_rows, dtype=np.int64).reshape(P, K)
        self.rev_origin = np.asarray(rev_rows, dtype=np.int64).reshape(P, K)
        pp = np.asarray(pair_of_path, dtype=np.int64)
        self.pair_path = sparse.csr_matrix((np.ones(P), (pp, np.arange(P))), shape=(Q, P))
        mask = self.edges < E
        rows = np.repeat(np.arange(P), K)[mask.ravel()]
        self.path_edge = sparse.csr_matrix((np.ones(rows.size), (rows, self.edges[mask])), shape=(P, E))

        self.F = np.zeros((Q, self.M))
        self.constrained = [len(r) for r in pairs.per_relationship]
        self.skipped = [0] * self.M
        for m, rows_m in enumerate(pairs.per_relationship):
            for i, j, f in rows_m:
                q = pair_ids.get((i, j))
                if q is None:
                    self.skipped[m] += 1
                else:
                    self.F[q, m] = f

    @property
    def n_pairs(self) -> int:
        return len(self.pair_ids)

    def _path_probs(self, w: np.ndarray, d: np.ndarray, alpha: float, direction: str):
        wpad = np.vstack([w, np.ones((1, self.M))])
        dpad = np.vstack([d, np.ones((1, self.M))])
        decay = (alpha ** self.lengths)[:, None]
        steps = wpad[self.edges]
        fwd = decay * np.prod(steps / dpad[self.fwd_origin], axis=1)
        if direction == "forward":
            return fwd, None
        rev = decay * np.prod(steps / dpad[self.rev_origin], axis=1)
        return fwd, rev

    def closeness(self, w: np.ndarray, alpha: float, direction: str = "mean",
                  degrees: np.ndarray | None = None) -> np.ndarray:
        """Pair closeness, shape ``(n_pairs, M)``."""
        d = weighted_degrees(self.graph, w) if degrees is None else degrees
        fwd, rev = self._path_probs(w, d, alpha, direction)
        c = self.pair_path @ fwd
        if rev is not None:
            c = 0.5 * (c + self.pair_path @ rev)
        return c

    def log_likelihood(self, w: np.ndarray, alpha: float, direction: str = "mean",
                       degrees: np.ndarray | None = None) -> float:
        if self.n_pairs == 0:
            return 0.0
        c = self.closeness(w, alpha, direction, degrees)
        active = self.F > 0
        return float(np.sum(self.F[active] * np.log(c[active])))

    def gradient(self, w: np.ndarray, alpha: float, direction: str = "mean",
                 degrees: np.ndarray | None = None) -> np.ndarray:
        """dJ/dW with weighted degrees held at their current values."""
        if self.n_pairs == 0:
            return np.zeros_like(w)
        d = weighted_degrees(self.graph, w) if degrees is None else degrees
        fwd, rev = self._path_probs(w, d, alpha, direction)
        if rev is None:
            through = fwd
            denom = self.pair_path @ fwd
        else:
            through = fwd + rev
            denom = self.pair_path @ through
        coef = np.divide(self.F, denom, out=np.zeros_like(self.F), where=self.F > 0)
        per_path = (self.pair_path.T @ coef) * through
        return np.asarray(self.path_edge.T @ per_path) / w


def _as_index(affinity, pairs, paths, cfg) -> PathIndex:
    return PathIndex(affinity.graph, pairs, paths, cfg.K)


def log_likelihood(affinity: AffinityGraphs, pairs: SimilarityPairs,
                   paths: Mapping[tuple[int, int], Sequence[PathDescriptor]],
                   cfg: FitConfig | ClosenessConfig, degrees: np.ndarray | None = None) -> float:
    """Similarity-weighted sum of log pair closeness; pathless pairs are skipped."""
    index = _as_index(affinity, pairs, paths, cfg)
    return index.log_likelihood(affinity.weights, cfg.alpha, cfg.direction, degrees)


def gradient(affinity: AffinityGraphs, pairs: SimilarityPairs,
             paths: Mapping[tuple[int, int], Sequence[PathDescriptor]],
             cfg: FitConfig | ClosenessConfig, degrees: np.ndarray | None = None) -> np.ndarray:
    """Per-edge, per-relationship gradient of :func:`log_likelihood`.

    For every path through edge ``e`` the path probability divided by the
    weight of ``e`` is accumulated, scaled by ``f / closeness`` of the pair
    the path joins. Weighted degrees are treated as constants.
    """
    index = _as_index(affinity, pairs, paths, cfg)
    return index.gradient(affinity.weights, cfg.alpha, cfg.direction, degrees)


def _initial_weights(E: int, M: int, cfg: FitConfig) -> np.ndarray:
    if M == 1:
        return np.ones((E, 1))
    if cfg.init == "uniform":
        return np.full((E, M), 1.0 / M)
    rng = np.random.default_rng(cfg.random_state)
    return project_simplex(rng.dirichlet(np.ones(M), size=E), cfg.epsilon)


def fit(
    graph: Graph,
    pairs: SimilarityPairs,
    cfg: FitConfig | None = None,
    cache: PathCache | None = None,
    callback: Callable[[int, np.ndarray, float], None] | None = None,
    paths: Mapping[tuple[int, int], Sequence[PathDescriptor]] | None = None,
) -> tuple[AffinityGraphs, FitReport]:
    """Learn relationship probabilities on every edge.

    Starts from uniform rows (or Dirichlet draws with ``init="random"``),
    then repeats: gradient step, row-wise simplex projection, and step
    halving until the objective does not decrease. Stops when the relative
    change ``|dJ| / (1 + |J|)`` drops below ``tol``, or after ``max_iter``
    iterations. If even the last halving lowers the objective the step is
    rejected; the iterate is then a fixed point, reported as converged with
    ``stop_reason="stalled"``.

    ``callback(iteration, weights, J)`` is invoked for the initial point and
    every accepted iterate.
    """
    cfg = cfg or FitConfig()
    M = pairs.relationship_count
    if M < 1:
        raise ConfigError("at least one relationship is required")
    if M * cfg.epsilon > 1:
        raise ConfigError(f"M * epsilon = {M * cfg.epsilon:g} exceeds 1")
    report = FitReport(truncation_bound=truncation_bound(cfg.alpha, cfg.K))
    logger.info("ignored reachability beyond K=%d is at most alpha^(K+1) = %.4g", cfg.K, report.truncation_bound)

    t0 = time.perf_counter()
    if paths is None:
        paths = collect_pair_paths(graph, pairs.unique_pairs(), cfg.K, cache=cache, n_jobs=cfg.n_jobs)
    t1 = time.perf_counter()
    index = PathIndex(graph, pairs, paths, cfg.K)
    t2 = time.perf_counter()
    report.timings.update(paths=t1 - t0, index=t2 - t1)
    report.constrained_pairs = list(index.constrained)
    report.skipped_pairs = list(index.skipped)
    report.n_paths = index.n_paths
    if cache is not None:
        report.cache = cache.stats()

    w = _initial_weights(graph.edge_count, M, cfg)
    affinity = AffinityGraphs(graph, w, pairs.relationship_names)
    J = index.log_likelihood(w, cfg.alpha, cfg.direction)
    report.objective.append(J)
    if callback is not None:
        callback(0, w, J)

    if index.n_pairs == 0:
        msg = ("no constrained pairs" if len(pairs) == 0
               else "every constrained pair is pathless within K hops")
        logger.warning("%s; returning initial weights", msg)
        report.warnings.append(msg)
        report.stop_reason = "no_pairs"
        report.converged = True
        report.timings["optimize"] = 0.0
        return affinity, report
    if sum(index.skipped):
        logger.info("skipped %s constrained pair(s) with no path of length <= %d", index.skipped, cfg.K)

    for it in range(1, cfg.max_iter + 1):
        grad = index.gradient(w, cfg.alpha, cfg.direction)
        step = cfg.step_size
        for _ in range(cfg.max_halvings + 1):
            w_new = project_simplex(w + step * grad, cfg.epsilon)
            J_new = index.log_likelihood(w_new, cfg.alpha, cfg.direction)
            if J_new >= J:
                break
            step *= 0.5
        else:
            # no halved step keeps J from falling: the iterate is a fixed point of
            # the monotone scheme, so J_t == J_{t-1} and the tolerance test is met
            report.stop_reason = "stalled"
            report.converged = True
            break
        change = abs(J_new - J) / (1.0 + abs(J))
        w, J = w_new, J_new
        report.objective.append(J)
        report.steps.append(step)
        report.n_iter = it
        if callback is not None:
            callback(it, w, J)
        if change < cfg.tol:
            report.stop_reason = "tolerance"
            report.converged = True
            break
    else:
        report.stop_reason = "max_iter"
    report.timings["optimize"] = time.perf_counter() - t2
    logger.info("fit stopped after %d iteration(s): %s (J=%.6g)", report.n_iter, report.stop_reason, J)
    return affinity.with_weights(w), report


def restart_spread(graph: Graph, pairs: SimilarityPairs, cfg: FitConfig, n_restarts: int = 5,
                   seed: int = 0, cache: PathCache | None = None) -> dict[str, float]:
    """Fit from several random starts; report how far the solutions disagree."""
    paths = collect_pair_paths(graph, pairs.unique_pairs(), cfg.K, cache=cache, n_jobs=cfg.n_jobs)
    sols, objs = [], []
    for r in range(n_restarts):
        run_cfg = FitConfig(**{**asdict(cfg), "init": "random", "random_state": seed + r})
        aff, rep = fit(graph, pairs, run_cfg, paths=paths)
        sols.append(aff.weights)
        objs.append(rep.objective[-1])
    stack = np.stack(sols)
    return {"max_weight_std": float(stack.std(axis=0).max()) if stack.size else 0.0,
            "objective_std": float(np.std(objs)),
            "objective_min": float(np.min(objs)),
            "objective_max": float(np.max(objs))}
