"""Local community detection from seed sets via random-walk embeddings."""

from walkscan.clustering import (
    Community,
    WalkscanParams,
    cluster_points,
    evaluate_expert,
    evaluate_merge,
    union_all,
    walkscan,
)
from walkscan.embedding import Embedding, SeedError, compute_embedding, walk_step
from walkscan.graph import CommunitySet, Graph, GraphFormatError, load_communities, load_edge_list
from walkscan.metrics import conductance, f1_score
from walkscan.ranking import (
    PageRankParams,
    calibrate_threshold,
    lexrank_community,
    pagerank_community,
    pagerank_from_embedding,
    pagerank_scores,
    pagerank_threshold,
    rank_lexicographic,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Community",
    "CommunitySet",
    "Embedding",
    "Graph",
    "GraphFormatError",
    "PageRankParams",
    "SeedError",
    "WalkscanParams",
    "calibrate_threshold",
    "cluster_points",
    "compute_embedding",
    "conductance",
    "evaluate_expert",
    "evaluate_merge",
    "f1_score",
    "lexrank_community",
    "load_communities",
    "load_edge_list",
    "pagerank_community",
    "pagerank_from_embedding",
    "pagerank_scores",
    "pagerank_threshold",
    "rank_lexicographic",
    "sweep",
    "union_all",
    "walk_step",
    "walkscan",
]
