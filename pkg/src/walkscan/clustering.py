"""WalkSCAN: density clustering of the random-walk embedding.

Points of V' within distance ``d`` of each other are linked; connected
components with at least two nodes are cores, the rest are outliers. Each
core then absorbs the outliers adjacent to it in the original graph, and the
resulting communities are ordered by decreasing mean embedding vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from walkscan import kernels
from walkscan.embedding import Embedding, compute_embedding
from walkscan.graph import Graph, as_nodeset
from walkscan.metrics import f1_score

MIN_CORE_SIZE = 2
DEFAULT_WS_HORIZON = 2
DEFAULT_DISTANCE = 0.1


@dataclass(frozen=True)
class WalkscanParams:
    distance: float = DEFAULT_DISTANCE
    horizon: int = DEFAULT_WS_HORIZON
    include_seeds: bool = True

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError("distance must be > 0")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")

    @property
    def min_core_size(self) -> int:
        return MIN_CORE_SIZE


class ClusterResult(NamedTuple):
    cores: list  # sorted node arrays, ordered by smallest member
    outliers: np.ndarray


class Community(NamedTuple):
    nodes: np.ndarray
    mean: np.ndarray


def point_components(points, d: float) -> np.ndarray:
    """Component label of each row of ``points`` under the ``<= d`` linkage.

    Identical points are merged before the grid search, which keeps dense
    regions of coincident vectors cheap.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.shape[0] == 0:
        return np.empty(0, np.int64)
    unique, inverse = np.unique(points, axis=0, return_inverse=True)
    return kernels.grid_components(unique, d)[inverse.ravel()]


def cluster_points(emb: Embedding, d: float) -> ClusterResult:
    if not d > 0:
        raise ValueError("distance must be > 0")
    labels = point_components(emb.vectors, d)
    if labels.size == 0:
        return ClusterResult([], np.empty(0, np.int64))
    sizes = np.bincount(labels)
    order = np.lexsort((emb.nodes, labels))
    bounds = np.cumsum(sizes)[:-1]
    groups = np.split(emb.nodes[order], bounds)
    cores = [grp for grp in groups if grp.size >= MIN_CORE_SIZE]
    cores.sort(key=lambda grp: grp[0])
    outliers = np.sort(emb.nodes[sizes[labels] < MIN_CORE_SIZE])
    return ClusterResult(cores, outliers)


def mean_vector(points) -> np.ndarray:
    """Mean of ``points`` as a fraction-weighted sum over distinct rows.

    A set of identical points gets exactly that point back (weight n/n = 1),
    so tied regions compare equal under the exact lexicographic order.
    """
    points = np.asarray(points, dtype=np.float64)
    unique, counts = np.unique(points, axis=0, return_counts=True)
    weights = counts / points.shape[0]
    return np.array([math.fsum(weights * unique[:, t]) for t in range(points.shape[1])])


def build_communities(g: Graph, emb: Embedding, clusters: ClusterResult) -> list[Community]:
    """Attach adjacent outliers to each core and sort by decreasing mean vector."""
    label = np.full(g.node_count, -1, dtype=np.int64)
    for j, core in enumerate(clusters.cores):
        label[core] = j
    members = [list(core) for core in clusters.cores]
    if clusters.outliers.size and clusters.cores:
        owner, nbrs = kernels.gather_neighbors(g.indptr, g.indices, clusters.outliers)
        hit = label[nbrs] >= 0
        pairs = np.unique(np.column_stack((label[nbrs[hit]], clusters.outliers[owner[hit]])), axis=0)
        for j, v in pairs.tolist():
            members[j].append(v)
    comms = []
    for nodes in members:
        nodes = as_nodeset(nodes)
        comms.append(Community(nodes, mean_vector(emb.vectors_for(nodes))))
    comms.sort(key=lambda c: (tuple((-c.mean).tolist()), int(c.nodes[0])))
    return comms


def walkscan(g: Graph, seeds, params: WalkscanParams = WalkscanParams()) -> list[Community]:
    """Communities around ``seeds``, most relevant first; empty if no core forms."""
    emb = compute_embedding(g, seeds, params.horizon)
    return build_communities(g, emb, cluster_points(emb, params.distance))


def _candidate(comm: Community, seeds, include_seeds: bool) -> np.ndarray:
    return np.union1d(comm.nodes, seeds) if include_seeds else comm.nodes


def evaluate_expert(comms, target, k: int, seeds, include_seeds: bool = True):
    """Best F1 among the first ``k`` communities; returns ``(f1, index)``.

    With no community the seed set itself is scored and the index is None.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    seeds = as_nodeset(seeds)
    if not comms:
        return f1_score(seeds, target).f1, None
    best, best_i = -1.0, None
    for i, comm in enumerate(comms[:k]):
        f = f1_score(_candidate(comm, seeds, include_seeds), target).f1
        if f > best:
            best, best_i = f, i
    return best, best_i


def evaluate_merge(comms, target, k: int, seeds, include_seeds: bool = True):
    """Best F1 over the first ``k`` communities and their pairwise unions.

    Returns ``(f1, (i, j))``; ``i == j`` marks a single community.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    seeds = as_nodeset(seeds)
    if not comms:
        return f1_score(seeds, target).f1, None
    head = [_candidate(c, seeds, include_seeds) for c in comms[:k]]
    best, best_pair = -1.0, None
    for i in range(len(head)):
        for j in range(i, len(head)):
            found = head[i] if i == j else np.union1d(head[i], head[j])
            f = f1_score(found, target).f1
            if f > best:
                best, best_pair = f, (i, j)
    return best, best_pair


def union_all(comms) -> np.ndarray:
    if not comms:
        return np.empty(0, np.int64)
    return as_nodeset(np.concatenate([c.nodes for c in comms]))
