"""Two overlapping cliques with their closed-form embedding, plus random perturbations.

Node layout of a generated graph::

    [0, n1 - overlap)                 C1 \\ C2
    [n1 - overlap, n1)                C1 ∩ C2
    [n1, n1 + n2 - overlap)           C2 \\ C1
    [n1 + n2 - overlap, ...)          background (isolated until perturbed)

With self-loops on every clique node, d(u) equals the size of the clique(s)
containing u, and the closed forms below are exact for T = 2. All embedding
vectors include the 1/|S| seed normalisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from walkscan.graph import Graph

REGIONS = ("1not2", "12", "2not1", "background")


@dataclass(frozen=True)
class TwoCliqueSpec:
    n1: int
    n2: int
    overlap: int
    with_self_loops: bool = True
    n_background: int = 0

    def __post_init__(self):
        if self.overlap < 0 or self.overlap > min(self.n1, self.n2):
            raise ValueError("overlap must lie in [0, min(n1, n2)]")
        if self.n1 <= self.overlap:
            raise ValueError("C1 \\ C2 must be non-empty (n1 > overlap)")
        if self.n_background < 0:
            raise ValueError("n_background must be >= 0")

    @property
    def union_size(self) -> int:
        return self.n1 + self.n2 - self.overlap

    @property
    def node_count(self) -> int:
        return self.union_size + self.n_background

    def region(self, name: str) -> np.ndarray:
        o, n1, u = self.overlap, self.n1, self.union_size
        bounds = {
            "1not2": (0, n1 - o),
            "12": (n1 - o, n1),
            "2not1": (n1, u),
            "background": (u, u + self.n_background),
        }
        lo, hi = bounds[name]
        return np.arange(lo, hi, dtype=np.int64)

    def c1(self) -> np.ndarray:
        return np.arange(0, self.n1, dtype=np.int64)

    def c2(self) -> np.ndarray:
        return np.arange(self.n1 - self.overlap, self.union_size, dtype=np.int64)

    def labels(self) -> np.ndarray:
        out = np.empty(self.node_count, dtype=object)
        for name in REGIONS:
            out[self.region(name)] = name
        return out


@dataclass(frozen=True)
class SeedSplit:
    a: int  # seeds in C1 \ C2
    b: int  # seeds in C1 ∩ C2

    def check(self, spec: TwoCliqueSpec):
        if self.a < 0 or self.b < 0 or self.a + self.b < 1:
            raise ValueError("seed split needs a, b >= 0 and a + b >= 1")
        if self.a > spec.n1 - spec.overlap:
            raise ValueError("a exceeds |C1 \\ C2|")
        if self.b > spec.overlap:
            raise ValueError("b exceeds |C1 ∩ C2|" if spec.overlap else "b > 0 needs a non-empty overlap")

    def seeds(self, spec: TwoCliqueSpec) -> np.ndarray:
        """First ``a`` nodes of C1 \\ C2 and first ``b`` of the overlap."""
        self.check(spec)
        return np.concatenate((spec.region("1not2")[: self.a], spec.region("12")[: self.b]))


def _clique_pairs(nodes, loops):
    i, j = np.triu_indices(nodes.size, k=0 if loops else 1)
    return np.column_stack((nodes[i], nodes[j]))


def two_clique_edges(spec: TwoCliqueSpec) -> np.ndarray:
    return np.concatenate(
        (_clique_pairs(spec.c1(), spec.with_self_loops), _clique_pairs(spec.c2(), spec.with_self_loops))
    )


def generate_two_cliques(spec: TwoCliqueSpec) -> tuple[Graph, np.ndarray]:
    """Graph of the two cliques plus isolated background, and per-node region labels."""
    return Graph.from_edges(spec.node_count, two_clique_edges(spec)), spec.labels()


class ToyEmbedding(NamedTuple):
    vec_12: np.ndarray
    vec_1not2: np.ndarray
    vec_2not1: np.ndarray
    alpha1: float
    alpha2: float
    beta: float

    def for_region(self, name: str) -> np.ndarray:
        if name == "background":
            return np.zeros(2)
        return {"12": self.vec_12, "1not2": self.vec_1not2, "2not1": self.vec_2not1}[name]


def closed_form_embedding(spec: TwoCliqueSpec, split: SeedSplit) -> ToyEmbedding:
    """Exact T=2 embedding of each region for the seed mixture ``split``."""
    if not spec.with_self_loops:
        raise ValueError("closed forms are exact only with self-loops")
    split.check(spec)
    n1, n2, o, u = spec.n1, spec.n2, spec.overlap, spec.union_size
    alpha1 = (n1 - o) / n1
    alpha2 = (n2 - o) / n2
    beta = o / u
    # single seed in C1 \ C2
    p1 = np.array([1.0, alpha1 + beta]) / n1
    p2 = np.array([0.0, beta]) / n1
    # single seed in C1 ∩ C2
    pA = np.array([1.0, alpha1 + alpha2 + beta]) / u
    pB = np.array([1.0, alpha1 + beta]) / u
    pC = np.array([1.0, alpha2 + beta]) / u
    a, b = split.a, split.b
    s = a + b
    return ToyEmbedding(
        (a * p1 + b * pA) / s,
        (a * p1 + b * pB) / s,
        (a * p2 + b * pC) / s,
        alpha1,
        alpha2,
        beta,
    )


class SeparationDistances(NamedTuple):
    d1: float
    d2_exact: float
    d2_bound: float


def separation_distances(spec: TwoCliqueSpec, split: SeedSplit) -> SeparationDistances:
    """Distances delimiting the three-core and two-core WalkSCAN regimes.

    ``d2_bound`` is the additive closed form, a triangle-inequality upper
    bound on ``d2_exact``.
    """
    emb = closed_form_embedding(spec, split)
    d1 = float(np.linalg.norm(emb.vec_1not2 - emb.vec_12))
    d2 = float(
        min(np.linalg.norm(emb.vec_2not1 - emb.vec_1not2), np.linalg.norm(emb.vec_2not1 - emb.vec_12))
    )
    a, b = split.a, split.b
    bound = (
        a / spec.n1 * math.sqrt(1.0 + emb.alpha1**2) + b / spec.union_size * abs(emb.alpha1 - emb.alpha2)
    ) / (a + b)
    return SeparationDistances(d1, d2, bound)


def _rebuild(g: Graph, edges) -> Graph:
    return Graph.from_edges(g.node_count, edges, ids=g.ids)


def perturb_remove_edges(g: Graph, spec: TwoCliqueSpec, k: int, rng_seed: int) -> Graph:
    """Drop ``k`` distinct non-loop intra-clique edges, uniformly at random."""
    if k < 0:
        raise ValueError("k must be >= 0")
    edges = g.edges()
    in_c1 = edges < spec.n1
    lo2, hi2 = spec.n1 - spec.overlap, spec.union_size
    in_c2 = (edges >= lo2) & (edges < hi2)
    intra = (in_c1.all(axis=1) | in_c2.all(axis=1)) & (edges[:, 0] != edges[:, 1])
    candidates = np.flatnonzero(intra)
    if k > candidates.size:
        raise ValueError(f"cannot remove {k} edges, only {candidates.size} intra-clique edges")
    if k == 0:
        return g
    rng = np.random.default_rng(rng_seed)
    drop = rng.choice(candidates, size=k, replace=False)
    keep = np.ones(edges.shape[0], dtype=bool)
    keep[drop] = False
    out = _rebuild(g, edges[keep])
    clique_nodes = np.arange(spec.union_size)
    if np.any(out.degree[clique_nodes] == 0):
        raise ValueError("edge removal isolated a clique node")
    return out


def perturb_add_external(g: Graph, spec: TwoCliqueSpec, l: int, rng_seed: int) -> Graph:
    """Add ``l`` distinct random edges between C1 ∪ C2 and the background."""
    if spec.n_background < 1:
        raise ValueError("no background nodes to link to")
    if l < 0:
        raise ValueError("l must be >= 0")
    inner = np.arange(spec.union_size, dtype=np.int64)
    outer = spec.region("background")
    pairs = np.column_stack((np.repeat(inner, outer.size), np.tile(outer, inner.size)))
    existing = {tuple(e) for e in g.edges().tolist()}
    free = np.array([i for i, p in enumerate(pairs.tolist()) if tuple(p) not in existing], dtype=np.int64)
    if l > free.size:
        raise ValueError(f"only {free.size} cross pairs available, asked for {l}")
    if l == 0:
        return g
    rng = np.random.default_rng(rng_seed)
    add = pairs[rng.choice(free, size=l, replace=False)]
    return _rebuild(g, np.concatenate((g.edges(), add)))


class PerturbationBounds(NamedTuple):
    """Bounds on the embedding shift, in seed-count-weighted scale.

    The mixture here is *not* divided by |S|; divide the |S|-proportional
    terms by |S| to compare with a measured (normalised) embedding.
    """

    mode: str
    count: int
    eps1A_max: float = 0.0
    eps2A: float = 0.0
    eps2B_max: float = 0.0
    eps1_in_max: float = 0.0
    eps1_out_max: float = 0.0
    eps2_in: float = 0.0
    eps2_out_max: float = 0.0
    d2: float = 0.0  # |S|/n1 * sqrt(1 + alpha1^2): limit for ||eps(v)|| (removed mode)
    outside_p2_limit: float = 0.0  # min region p2 - distance (external mode)


def perturbation_bounds(
    spec: TwoCliqueSpec, s_size: int, count: int, mode: str, distance: float = 0.0
) -> PerturbationBounds:
    """Evaluate the perturbation bounds for ``count`` removed (or added external) edges.

    ``mode`` is ``"removed"`` or ``"external"``; seeds are assumed to lie in
    C1 \\ C2.
    """
    if count < 0 or s_size < 1:
        raise ValueError("count must be >= 0 and s_size >= 1")
    n1, o, u = spec.n1, spec.overlap, spec.union_size
    only1 = n1 - o
    S = s_size
    alpha1 = only1 / n1
    if mode == "removed":
        k = count
        if k >= n1:
            raise ValueError("k must be < n1")
        eps1A = k * S / (n1 * (n1 - k))
        eps2A = S * (
            only1 * (1.0 / (n1 - k) ** 2 - 1.0 / n1**2)
            + o * (1.0 / ((n1 - k) * (u - k)) - 1.0 / (n1 * u))
        )
        return PerturbationBounds(
            mode, k, eps1A_max=eps1A, eps2A=eps2A, eps2B_max=k / n1**2,
            d2=S / n1 * math.sqrt(1.0 + alpha1**2),
        )
    if mode == "external":
        l = count
        eps2_in = S * (
            only1 * (1.0 / n1**2 - 1.0 / (n1 + l) ** 2)
            + o * (1.0 / (n1 * u) - 1.0 / ((n1 + l) * (u + l)))
        )
        emb = closed_form_embedding(spec, SeedSplit(min(S, only1), 0)) if spec.with_self_loops else None
        limit = 0.0
        if emb is not None:
            second = min(emb.vec_12[1], emb.vec_1not2[1], emb.vec_2not1[1]) if o else emb.vec_1not2[1]
            limit = S * second - distance
        return PerturbationBounds(
            mode, l, eps1_in_max=l * S / (n1 * (n1 + l)), eps1_out_max=l / n1,
            eps2_in=eps2_in, eps2_out_max=l / n1**2, outside_p2_limit=limit,
        )
    raise ValueError(f"unknown mode {mode!r}")
