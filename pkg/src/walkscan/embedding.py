"""Random-walk embedding v -> (p_1(v), ..., p_T(v)) from a seed set.

Distributions are sparse: only nodes with positive mass are stored, so the
cost of a step is the total degree of the current support, independent of
the graph size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from walkscan import kernels
from walkscan.graph import Graph, as_nodeset


class SeedError(ValueError):
    """Seed set unusable as a walk start (empty, out of range, or degree 0)."""


@dataclass(frozen=True, eq=False)
class WalkDistribution:
    t: int
    nodes: np.ndarray  # sorted support
    mass: np.ndarray

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.nodes.tolist(), self.mass.tolist()))

    def total(self) -> float:
        return float(self.mass.sum())


def validate_seeds(g: Graph, seeds) -> np.ndarray:
    seeds = as_nodeset(seeds)
    if seeds.size == 0:
        raise SeedError("seed set is empty")
    if seeds[0] < 0 or seeds[-1] >= g.node_count:
        raise SeedError("seed id out of range")
    isolated = seeds[g.degree[seeds] == 0]
    if isolated.size:
        raise SeedError(f"seed(s) with degree 0: {isolated.tolist()}")
    return seeds


def initial_distribution(seeds: np.ndarray) -> WalkDistribution:
    return WalkDistribution(0, seeds, np.full(seeds.size, 1.0 / seeds.size))


def walk_step(g: Graph, dist: WalkDistribution) -> WalkDistribution:
    """p_{t+1}(v) = sum_u A[u, v] / d(u) * p_t(u)."""
    if dist.nodes.size and np.any(g.degree[dist.nodes] == 0):
        raise ValueError("walk distribution has mass on a degree-0 node")
    nodes, mass = kernels.push(g.indptr, g.indices, g.degree, dist.nodes, dist.mass)
    return WalkDistribution(dist.t + 1, nodes, mass)


@dataclass(frozen=True, eq=False)
class Embedding:
    """Embedded points for the nodes with a nonzero vector (the set V').

    ``vectors[i]`` is the point of ``nodes[i]``; absent nodes sit at the
    origin. ``steps`` keeps p_0 .. p_T.
    """

    horizon: int
    seeds: np.ndarray
    nodes: np.ndarray
    vectors: np.ndarray
    steps: tuple

    def __len__(self):
        return self.nodes.size

    def index(self, nodes) -> np.ndarray:
        """Row of each node in ``vectors``, -1 if the node is absent."""
        nodes = np.asarray(nodes, dtype=np.int64)
        pos = np.searchsorted(self.nodes, nodes)
        pos = np.minimum(pos, max(self.nodes.size - 1, 0))
        hit = self.nodes.size > 0
        found = (self.nodes[pos] == nodes) if hit else np.zeros(nodes.shape, bool)
        return np.where(found, pos, -1)

    def vector(self, v: int) -> np.ndarray:
        i = int(self.index([v])[0])
        return self.vectors[i].copy() if i >= 0 else np.zeros(self.horizon)

    def vectors_for(self, nodes) -> np.ndarray:
        """Points of ``nodes`` (zeros for absent ones)."""
        idx = self.index(nodes)
        out = np.zeros((idx.size, self.horizon))
        out[idx >= 0] = self.vectors[idx[idx >= 0]]
        return out

    def as_dict(self) -> dict[int, tuple]:
        return {v: tuple(row) for v, row in zip(self.nodes.tolist(), self.vectors.tolist())}


def compute_embedding(g: Graph, seeds, horizon: int) -> Embedding:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    seeds = validate_seeds(g, seeds)
    steps = [initial_distribution(seeds)]
    for _ in range(horizon):
        steps.append(walk_step(g, steps[-1]))
    support = np.unique(np.concatenate([s.nodes for s in steps[1:]]))
    vectors = np.zeros((support.size, horizon))
    for s in steps[1:]:
        vectors[np.searchsorted(support, s.nodes), s.t - 1] = s.mass
    return Embedding(horizon, seeds, support, vectors, tuple(steps))
