"""Relationship profiling on attributed social graphs.

Learns, for each edge of an undirected graph, how likely it is to carry each
of several relationships (e.g. schoolmate, colleague). Node pairs that share
attribute values are pulled close under a decayed random walk restricted to
short simple paths, and the per-edge relationship weights that best explain
those closeness constraints are found by projected gradient ascent.
"""

__version__ = "0.1.0"

from .closeness import AffinityGraphs, ClosenessConfig, pair_closeness, path_probability, truncation_bound
from .estimator import RelationshipProfiler
from .evaluate import (LabelSet, PredictionSet, score_prf, systematicness_completeness,
                       threshold_predictions)
from .exceptions import ConfigError, DegenerateRunError, InputError
from .graph import AttributeTable, Graph, RelationshipSpec, build_graph, load_attributes
from .optimizer import FitConfig, FitReport, fit, gradient, log_likelihood, project_simplex
from .pathfinder import PathCache, PathDescriptor, PathSet, descriptor_contains, find_paths, pair_paths
from .similarity import (SimilarityPairs, categorical_similarity, combine_similarities,
                         compute_similarity_pairs, numerical_similarity)

__all__ = [
    "AffinityGraphs", "AttributeTable", "ClosenessConfig", "ConfigError", "DegenerateRunError",
    "FitConfig", "FitReport", "Graph", "InputError", "LabelSet", "PathCache", "PathDescriptor",
    "PathSet", "PredictionSet", "RelationshipProfiler", "RelationshipSpec", "SimilarityPairs",
    "build_graph", "categorical_similarity", "combine_similarities", "compute_similarity_pairs",
    "descriptor_contains", "find_paths", "fit", "gradient", "load_attributes", "log_likelihood",
    "numerical_similarity", "pair_closeness", "pair_paths", "path_probability", "project_simplex",
    "score_prf", "systematicness_completeness", "threshold_predictions", "truncation_bound",
]
