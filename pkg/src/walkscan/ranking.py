"""Node rankings (PageRank family and lexicographic) and the cuts taken from them."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from walkscan import kernels
from walkscan.embedding import Embedding, compute_embedding, initial_distribution, validate_seeds
from walkscan.graph import CommunitySet, Graph, as_nodeset, sample_seeds, trial_rng

DEFAULT_ALPHA = 0.85
DEFAULT_HORIZON = 3


@dataclass(frozen=True)
class PageRankParams:
    alpha: float = DEFAULT_ALPHA
    horizon: int = DEFAULT_HORIZON
    degree_normalized: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True, eq=False)
class ScoreTable:
    """Sparse scores: ``scores[i]`` belongs to ``nodes[i]``; absent nodes score 0.

    ``scores`` is what rankings use (r_T/d when ``params.degree_normalized``),
    ``raw`` is always r_T.
    """

    nodes: np.ndarray
    scores: np.ndarray
    raw: np.ndarray
    seeds: np.ndarray
    params: PageRankParams

    def score(self, v: int) -> float:
        i = np.searchsorted(self.nodes, v)
        if i < self.nodes.size and self.nodes[i] == v:
            return float(self.scores[i])
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.nodes.tolist(), self.scores.tolist()))


def _sparse_axpy(a, nodes_x, x, b, nodes_y, y):
    """a*x + b*y over the union of the two supports."""
    nodes = np.union1d(nodes_x, nodes_y)
    out = np.zeros(nodes.size)
    out[np.searchsorted(nodes, nodes_x)] += a * x
    out[np.searchsorted(nodes, nodes_y)] += b * y
    return nodes, out


def _table(g, nodes, raw, seeds, params):
    keep = raw > 0
    nodes, raw = nodes[keep], raw[keep]
    scores = raw / g.degree[nodes] if params.degree_normalized else raw
    return ScoreTable(nodes, scores, raw, seeds, params)


def pagerank_scores(g: Graph, seeds, params: PageRankParams = PageRankParams()) -> ScoreTable:
    """r_{t+1} = (1 - alpha) r_0 + alpha * (walk step of r_t), iterated ``horizon`` times."""
    seeds = validate_seeds(g, seeds)
    r0 = initial_distribution(seeds)
    nodes, r = r0.nodes, r0.mass
    for _ in range(params.horizon):
        pushed_nodes, pushed = kernels.push(g.indptr, g.indices, g.degree, nodes, r)
        nodes, r = _sparse_axpy(1.0 - params.alpha, r0.nodes, r0.mass, params.alpha, pushed_nodes, pushed)
    return _table(g, nodes, r, seeds, params)


def pagerank_from_embedding(emb: Embedding, seeds, alpha: float) -> ScoreTable:
    """PageRank values read off the embedding as a weighted sum of coordinates.

    r_T(v) = sum_{t<T} (1-alpha) alpha^t p_t(v) + alpha^T p_T(v). For
    non-seeds p_0 vanishes; seeds get their (1-alpha)/|S| restart term from
    p_0, which the embedding carries in ``steps[0]``. Scores are never
    degree-normalised here.
    """
    seeds = as_nodeset(seeds)
    if not np.array_equal(seeds, emb.seeds):
        raise ValueError("seed set differs from the one the embedding was computed from")
    T = emb.horizon
    weights = np.array([(1.0 - alpha) * alpha**t for t in range(1, T)] + [alpha**T])
    coords = emb.vectors * weights
    raw_support = coords[:, 0].copy()
    for t in range(1, T):
        raw_support += coords[:, t]
    p0 = emb.steps[0]
    nodes, raw = _sparse_axpy(1.0, emb.nodes, raw_support, 1.0 - alpha, p0.nodes, p0.mass)
    return _table(None, nodes, raw, seeds, PageRankParams(alpha, T))


def lex_compare(u, v) -> int:
    """-1, 0 or 1 as ``u`` precedes, equals or follows ``v`` in lexicographic order.

    Exact float comparison: the first differing coordinate decides.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError("vectors differ in length")
    diff = np.flatnonzero(u != v)
    if diff.size == 0:
        return 0
    s = diff[0]
    return -1 if u[s] < v[s] else 1


def rank_by_score(table: ScoreTable) -> np.ndarray:
    """Non-seed nodes with positive score, by decreasing score then increasing id."""
    keep = ~np.isin(table.nodes, table.seeds, assume_unique=True)
    nodes, scores = table.nodes[keep], table.scores[keep]
    return nodes[np.lexsort((nodes, -scores))]


def rank_lexicographic(emb: Embedding) -> np.ndarray:
    """Non-seed embedded nodes, lexicographically decreasing, ties by increasing id."""
    keep = ~np.isin(emb.nodes, emb.seeds, assume_unique=True)
    nodes, vecs = emb.nodes[keep], emb.vectors[keep]
    keys = (nodes,) + tuple(-vecs[:, t] for t in reversed(range(emb.horizon)))
    return nodes[np.lexsort(keys)]


Objective = Callable[[Graph, np.ndarray], float]


def sweep_profile(g: Graph, seeds, ranked, objective: str | Objective = "conductance") -> np.ndarray:
    """Objective value (higher is better) of S and of S ∪ S_k for k = 1..len(ranked).

    Entry 0 is S alone.
    """
    seeds = as_nodeset(seeds)
    ranked = np.asarray(ranked, dtype=np.int64)
    if objective == "conductance":
        cond = kernels.sweep_conductance(
            g.indptr, g.indices, g.degree, g.loops, seeds, ranked, g.total_volume
        )
        return -cond
    if not callable(objective):
        raise ValueError(f"unknown objective {objective!r}")
    return np.array(
        [objective(g, np.union1d(seeds, ranked[:k])) for k in range(ranked.size + 1)], dtype=np.float64
    )


def sweep(g: Graph, seeds, ranked, objective: str | Objective = "conductance") -> np.ndarray:
    """S ∪ S_k* with k* = argmax_k f(S ∪ S_k) over k >= 1; smallest k wins ties."""
    seeds = as_nodeset(seeds)
    ranked = np.asarray(ranked, dtype=np.int64)
    if ranked.size == 0:
        return seeds
    profile = sweep_profile(g, seeds, ranked, objective)
    k = int(np.argmax(profile[1:])) + 1
    return np.union1d(seeds, ranked[:k])


def pagerank_community(
    g: Graph, seeds, params: PageRankParams = PageRankParams(), objective="conductance"
) -> np.ndarray:
    table = pagerank_scores(g, seeds, params)
    return sweep(g, table.seeds, rank_by_score(table), objective)


def pagerank_threshold(scores: ScoreTable, seeds, lam: float) -> np.ndarray:
    """S ∪ {v : score(v) > lam}."""
    if lam < 0:
        raise ValueError("threshold must be >= 0")
    return np.union1d(as_nodeset(seeds), scores.nodes[scores.scores > lam])


def lexrank_community(g: Graph, seeds, horizon: int = DEFAULT_HORIZON, objective="conductance") -> np.ndarray:
    emb = compute_embedding(g, seeds, horizon)
    return sweep(g, emb.seeds, rank_lexicographic(emb), objective)


def _threshold_f1_steps(table: ScoreTable, target: np.ndarray):
    """Distinct non-seed scores (ascending) and F1 when all nodes above each are kept.

    Returns ``(levels, f1_above, f1_all)``: ``f1_above[j]`` is the F1 of the
    threshold output at lambda = ``levels[j]``; ``f1_all`` is the F1 below the
    smallest level.
    """
    seeds = table.seeds
    keep = ~np.isin(table.nodes, seeds, assume_unique=True)
    nodes, scores = table.nodes[keep], table.scores[keep]
    order = np.lexsort((nodes, -scores))
    nodes, scores = nodes[order], scores[order]
    in_target = np.isin(nodes, target, assume_unique=True)
    base_hits = int(np.isin(seeds, target, assume_unique=True).sum())
    hits = base_hits + np.concatenate(([0], np.cumsum(in_target)))
    found = seeds.size + np.arange(nodes.size + 1)
    precision = np.where(found > 0, hits / np.maximum(found, 1), 0.0)
    recall = hits / target.size
    denom = precision + recall
    f1 = np.where(denom > 0, 2.0 * precision * recall / np.where(denom > 0, denom, 1.0), 0.0)
    # levels ascending; nodes strictly above levels[j] are the first `count_above` in descending order
    levels, counts = np.unique(scores, return_counts=True)
    count_above = nodes.size - np.cumsum(counts)
    return levels, f1[count_above], float(f1[nodes.size])


def calibrate_threshold(
    g: Graph,
    training: CommunitySet,
    params: PageRankParams = PageRankParams(),
    seed_fraction: float = 0.1,
    rng_seed: int = 0,
    workers: int = 1,
) -> float:
    """Threshold maximising mean F1 of :func:`pagerank_threshold` over ``training``.

    Candidates are 0 and every score observed on the training runs. Community
    ``i`` draws its seeds from ``trial_rng(rng_seed, i)``. Ties go to the
    smaller threshold.
    """
    if len(training) == 0:
        raise ValueError("training set is empty")

    def one(i):
        c = training[i]
        seeds = sample_seeds(g, c, math.ceil(c.size * seed_fraction), trial_rng(rng_seed, i))
        if seeds.size == 0:
            return None
        return _threshold_f1_steps(pagerank_scores(g, seeds, params), c)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            steps = list(pool.map(one, range(len(training))))
    else:
        steps = [one(i) for i in range(len(training))]
    steps = [s for s in steps if s is not None]
    if not steps:
        raise ValueError("no training community has a positive-degree node")

    grid = np.unique(np.concatenate([[0.0]] + [s[0] for s in steps]))
    # F1 of each community is a step function of lambda changing only at its
    # own levels, so accumulate differences on the grid.
    delta = np.zeros(grid.size)
    for levels, f1_above, f1_all in steps:
        delta[0] += f1_all
        at = np.searchsorted(grid, levels)
        prev = np.concatenate(([f1_all], f1_above[:-1]))
        np.add.at(delta, at, f1_above - prev)
    mean_f1 = np.cumsum(delta) / len(steps)
    best = mean_f1.max()
    # differences accumulate rounding; treat near-equal means as ties
    return float(grid[np.flatnonzero(mean_f1 >= best - 1e-12)[0]])
