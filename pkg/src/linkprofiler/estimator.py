"""scikit-learn style front end to relationship profiling."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_graph, check_side_information, check_thresholds
from .evaluate import LabelSet, score_prf, threshold_predictions
from .graph import AttributeTable
from .optimizer import FitConfig, fit
from .pathfinder import DEFAULT_CACHE_CAPACITY, PathCache
from .similarity import compute_similarity_pairs


class RelationshipProfiler(BaseEstimator):
    """Learn, for every edge, a probability distribution over relationships.

    The model is transductive: ``fit`` takes the graph and its node
    attributes (or precomputed similarity pairs), and ``predict_proba``
    returns the learned ``(n_edges, n_relationships)`` matrix for that same
    graph.

    Parameters
    ----------
    K : int
        Longest path, in edges, that counts toward closeness.
    alpha : float
        Per-step decay of random-walk reachability, in (0, 1].
    step_size : float
        Initial gradient-ascent step; halved while the objective drops.
    max_iter : int
        Iteration cap.
    tol : float
        Relative objective change below which the fit stops.
    epsilon : float
        Floor on every edge weight.
    direction : {"mean", "forward"}
        Whether pair closeness averages both walk directions.
    thresholds : float, sequence or mapping
        Cut-off per relationship used by ``predict``.
    cache_capacity : int
        Number of per-source path sets kept in the LRU cache.
    n_jobs : int or None
        Worker processes for path enumeration.
    init : {"uniform", "random"}
        Starting weights; "random" draws Dirichlet rows from ``random_state``.

    Attributes
    ----------
    weights_ : ndarray of shape (n_edges, n_relationships)
    affinity_ : AffinityGraphs
    pairs_ : SimilarityPairs
    report_ : FitReport
    relationship_names_ : tuple of str
    n_iter_ : int
    """

    def __init__(self, K=3, alpha=0.8, step_size=0.05, max_iter=100, tol=1e-6, epsilon=1e-6,
                 direction="mean", thresholds=0.5, cache_capacity=DEFAULT_CACHE_CAPACITY,
                 n_jobs=1, init="uniform", random_state=None, max_halvings=10):
        self.K = K
        self.alpha = alpha
        self.step_size = step_size
        self.max_iter = max_iter
        self.tol = tol
        self.epsilon = epsilon
        self.direction = direction
        self.thresholds = thresholds
        self.cache_capacity = cache_capacity
        self.n_jobs = n_jobs
        self.init = init
        self.random_state = random_state
        self.max_halvings = max_halvings

    def _config(self) -> FitConfig:
        return FitConfig(step_size=self.step_size, max_iter=self.max_iter, tol=self.tol, K=self.K,
                         alpha=self.alpha, direction=self.direction, epsilon=self.epsilon,
                         max_halvings=self.max_halvings, init=self.init,
                         random_state=self.random_state, n_jobs=self.n_jobs)

    def fit(self, graph, attributes, callback=None):
        """Fit edge weights to ``graph`` given an AttributeTable or SimilarityPairs."""
        graph = check_graph(graph)
        info = check_side_information(attributes, graph)
        cfg = self._config()
        if isinstance(info, AttributeTable):
            pairs = compute_similarity_pairs(info, graph, K=cfg.K)
        else:
            pairs = info
        check_thresholds(self.thresholds, pairs.relationship_names)
        self.cache_ = PathCache(self.cache_capacity)
        self.affinity_, self.report_ = fit(graph, pairs, cfg, cache=self.cache_, callback=callback)
        self.graph_ = graph
        self.pairs_ = pairs
        self.weights_ = self.affinity_.weights
        self.relationship_names_ = pairs.relationship_names
        self.n_iter_ = self.report_.n_iter
        return self

    def _check_graph(self, graph):
        check_is_fitted(self, "weights_")
        if graph is not None and graph is not self.graph_:
            raise ValueError("RelationshipProfiler is transductive; pass the fitted graph or None")

    def predict_proba(self, graph=None) -> np.ndarray:
        """Relationship probabilities, one row per edge."""
        self._check_graph(graph)
        return self.weights_.copy()

    transform = predict_proba

    def predict(self, graph=None) -> np.ndarray:
        """Boolean ``(n_edges, n_relationships)`` matrix after thresholding."""
        self._check_graph(graph)
        thetas = check_thresholds(self.thresholds, self.relationship_names_)
        return threshold_predictions(self.weights_, thetas).predicted

    def fit_transform(self, graph, attributes):
        return self.fit(graph, attributes).predict_proba()

    def fit_predict(self, graph, attributes):
        return self.fit(graph, attributes).predict()

    def score(self, labels: LabelSet) -> float:
        """Mean F1 over relationships that have gold positives."""
        check_is_fitted(self, "weights_")
        thetas = check_thresholds(self.thresholds, self.relationship_names_)
        pred = threshold_predictions(self.weights_, thetas)
        f1s = []
        for m in range(len(self.relationship_names_)):
            try:
                f1s.append(score_prf(pred, labels, m).f1)
            except ValueError:
                continue
        return float(np.mean(f1s)) if f1s else 0.0
