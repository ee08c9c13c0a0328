"""Experiment harness for the recovery benchmarks and the d-sweep.

Randomness: every trial draws from ``trial_rng(rng_seed, experiment_code,
point_index, trial_index)``; see :data:`EXPERIMENT_CODES`. A trial can
therefore be replayed on its own, and results do not depend on the order in
which trials run.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from walkscan._jit import backend_name
from walkscan.clustering import (
    WalkscanParams,
    build_communities,
    cluster_points,
    evaluate_expert,
    evaluate_merge,
    union_all,
    walkscan,
)
from walkscan.embedding import compute_embedding
from walkscan.graph import (
    CommunitySet,
    Graph,
    as_nodeset,
    node_memberships,
    nodes_within_distance,
    sample_seeds,
    trial_rng,
)
from walkscan.metrics import f1_score
from walkscan.ranking import (
    PageRankParams,
    calibrate_threshold,
    lexrank_community,
    pagerank_scores,
    pagerank_threshold,
    rank_by_score,
    sweep,
)

logger = logging.getLogger(__name__)

ALGORITHMS = ("pr", "prt", "lr", "ws", "ws-expert", "ws-merge")
EXPERIMENT_CODES = {"single": 1, "random-seeds": 2, "local-seeds": 3, "d-sweep": 4}
DEFAULT_D_GRID = tuple(float(x) for x in np.logspace(-3, 0, 13))


@dataclass
class ExperimentConfig:
    kind: str = "single"
    algorithms: tuple = ALGORITHMS
    seed_fraction: float = 0.1
    expert_k: int = 2
    distance: float = 0.1
    alpha: float = 0.85
    pr_horizon: int = 3
    ws_horizon: int = 2
    degree_normalized: bool = False
    lam: float | None = None
    k_values: tuple = (1, 2, 3, 4, 5)
    l_values: tuple = (1, 2, 3)
    d_values: tuple = DEFAULT_D_GRID
    runs: int = 1000
    rng_seed: int = 0
    workers: int = 1
    graph_path: str | None = None
    communities_path: str | None = None
    max_communities: int = 5000

    def __post_init__(self):
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithm(s): {sorted(unknown)}")
        if self.kind not in EXPERIMENT_CODES:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.expert_k < 1:
            raise ValueError("expert_k must be >= 1")

    @property
    def pr_params(self) -> PageRankParams:
        return PageRankParams(self.alpha, self.pr_horizon, self.degree_normalized)

    def ws_params(self, distance: float | None = None) -> WalkscanParams:
        return WalkscanParams(self.distance if distance is None else distance, self.ws_horizon)


@dataclass
class ResultRow:
    experiment: str
    algorithm: str
    point: str
    mean_f1: float
    trials: int
    rng_seed: int


@dataclass
class TrialRow:
    experiment: str
    point: str
    trial: int
    seeds: int
    scores: dict = field(default_factory=dict)


@dataclass
class BenchResult:
    rows: list
    trials: list
    meta: dict


def seed_count(community, fraction: float) -> int:
    return math.ceil(community.size * fraction)


def score_algorithms(g: Graph, seeds, target, algorithms, cfg: ExperimentConfig, lam=None) -> dict:
    """F1 of each requested algorithm on one seed set."""
    out = {}
    if {"pr", "prt"} & set(algorithms):
        table = pagerank_scores(g, seeds, cfg.pr_params)
        if "pr" in algorithms:
            out["pr"] = f1_score(sweep(g, table.seeds, rank_by_score(table)), target).f1
        if "prt" in algorithms and lam is not None:
            out["prt"] = f1_score(pagerank_threshold(table, seeds, lam), target).f1
    if "lr" in algorithms:
        out["lr"] = f1_score(lexrank_community(g, seeds, cfg.pr_horizon), target).f1
    ws_modes = [a for a in algorithms if a.startswith("ws")]
    if ws_modes:
        comms = walkscan(g, seeds, cfg.ws_params())
        out.update(_walkscan_scores(comms, seeds, target, ws_modes, cfg.expert_k))
    return out


def _walkscan_scores(comms, seeds, target, modes, expert_k) -> dict:
    out = {}
    if "ws" in modes:
        out["ws"] = evaluate_expert(comms, target, 1, seeds)[0]
    if "ws-expert" in modes:
        out["ws-expert"] = evaluate_expert(comms, target, expert_k, seeds)[0]
    if "ws-merge" in modes:
        out["ws-merge"] = evaluate_merge(comms, target, expert_k, seeds)[0]
    if "ws-union" in modes:
        found = np.union1d(union_all(comms), seeds)
        out["ws-union"] = f1_score(found, target).f1
    return out


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _aggregate(kind, point, trials, algorithms, rng_seed):
    rows = []
    for algo in algorithms:
        vals = [t.scores[algo] for t in trials if algo in t.scores]
        if vals:
            rows.append(ResultRow(kind, algo, point, math.fsum(vals) / len(vals), len(vals), rng_seed))
    return rows


def run_single_recovery(g: Graph, communities: CommunitySet, cfg: ExperimentConfig) -> BenchResult:
    """Seeds: ceil(|C| * seed_fraction) random members of each community C.

    When PageRankThreshold runs without a fixed lambda, lambda is calibrated on
    the even-indexed communities and PRT is scored on the odd-indexed ones.
    """
    algorithms = tuple(cfg.algorithms)
    lam, prt_eval = cfg.lam, None
    meta = {}
    if "prt" in algorithms and lam is None:
        training = CommunitySet(tuple(communities[i] for i in range(0, len(communities), 2)))
        lam = calibrate_threshold(g, training, cfg.pr_params, cfg.seed_fraction, cfg.rng_seed, cfg.workers)
        prt_eval = set(range(1, len(communities), 2))
        meta["calibrated_lambda"] = lam
    meta["lambda"] = lam
    code = EXPERIMENT_CODES["single"]

    def trial(i):
        c = communities[i]
        seeds = sample_seeds(g, c, seed_count(c, cfg.seed_fraction), trial_rng(cfg.rng_seed, code, 0, i))
        if seeds.size == 0:
            return None
        algos = algorithms
        if prt_eval is not None and i not in prt_eval:
            algos = tuple(a for a in algos if a != "prt")
        return TrialRow("single", "", i, int(seeds.size), score_algorithms(g, seeds, c, algos, cfg, lam))

    trials = _map(trial, range(len(communities)), cfg.workers)
    meta["skipped_communities"] = sum(t is None for t in trials)
    trials = [t for t in trials if t is not None]
    return BenchResult(_aggregate("single", "", trials, algorithms, cfg.rng_seed), trials, meta)


def run_random_seed_bench(g: Graph, communities: CommunitySet, cfg: ExperimentConfig) -> BenchResult:
    """k uniform seeds among community members; target = union of their communities.

    PR is scored on its sweep output, WalkSCAN on the union of all its
    communities (plus the seeds).
    """
    member_of = node_memberships(communities, g.node_count)
    eligible = np.array([v for v in range(g.node_count) if member_of[v] and g.degree[v] > 0], dtype=np.int64)
    if eligible.size == 0:
        raise ValueError("no positive-degree node belongs to a community")
    code = EXPERIMENT_CODES["random-seeds"]
    rows, all_trials = [], []
    for j, k in enumerate(cfg.k_values):
        if k > eligible.size:
            raise ValueError(f"k={k} exceeds the {eligible.size} eligible nodes")

        def trial(r, k=k, j=j):
            rng = trial_rng(cfg.rng_seed, code, j, r)
            seeds = np.sort(rng.choice(eligible, size=k, replace=False))
            target = as_nodeset(np.concatenate([communities[c] for v in seeds for c in member_of[v]]))
            table = pagerank_scores(g, seeds, cfg.pr_params)
            pr = f1_score(sweep(g, table.seeds, rank_by_score(table)), target).f1
            comms = walkscan(g, seeds, cfg.ws_params())
            ws = f1_score(np.union1d(union_all(comms), seeds), target).f1
            return TrialRow("random-seeds", str(k), r, k, {"pr": pr, "ws": ws})

        trials = _map(trial, range(cfg.runs), cfg.workers)
        rows += _aggregate("random-seeds", str(k), trials, ("pr", "ws"), cfg.rng_seed)
        all_trials += trials
    return BenchResult(rows, all_trials, {})


def run_local_seed_bench(g: Graph, communities: CommunitySet, cfg: ExperimentConfig) -> BenchResult:
    """Seeds drawn from the l-hop ball around each community; PR vs WS-Expert."""
    code = EXPERIMENT_CODES["local-seeds"]
    rows, all_trials, skipped = [], [], {}
    for j, l in enumerate(cfg.l_values):

        def trial(i, l=l, j=j):
            c = communities[i]
            ball = nodes_within_distance(g, c, l)
            seeds = sample_seeds(g, ball, seed_count(c, cfg.seed_fraction), trial_rng(cfg.rng_seed, code, j, i))
            if seeds.size == 0:
                return None
            return TrialRow(
                "local-seeds", str(l), i, int(seeds.size),
                score_algorithms(g, seeds, c, ("pr", "ws-expert"), cfg),
            )

        trials = _map(trial, range(len(communities)), cfg.workers)
        skipped[str(l)] = sum(t is None for t in trials)
        trials = [t for t in trials if t is not None]
        rows += _aggregate("local-seeds", str(l), trials, ("pr", "ws-expert"), cfg.rng_seed)
        all_trials += trials
    return BenchResult(rows, all_trials, {"skipped_communities": skipped})


def run_d_sweep(g: Graph, communities: CommunitySet, cfg: ExperimentConfig) -> BenchResult:
    """Single-recovery protocol for WS and WS-Expert at each distance.

    Every distance reuses the same seed set per community, so the curve is
    not blurred by resampling.
    """
    code = EXPERIMENT_CODES["d-sweep"]
    modes = ("ws", "ws-expert")

    def trial(i):
        c = communities[i]
        seeds = sample_seeds(g, c, seed_count(c, cfg.seed_fraction), trial_rng(cfg.rng_seed, code, 0, i))
        if seeds.size == 0:
            return None
        emb = compute_embedding(g, seeds, cfg.ws_horizon)
        out = []
        for d in cfg.d_values:
            comms = build_communities(g, emb, cluster_points(emb, d))
            out.append(TrialRow("d-sweep", repr(float(d)), i, int(seeds.size),
                                _walkscan_scores(comms, seeds, c, modes, cfg.expert_k)))
        return out

    per_community = [t for t in _map(trial, range(len(communities)), cfg.workers) if t is not None]
    rows, all_trials = [], []
    for j, d in enumerate(cfg.d_values):
        trials = [t[j] for t in per_community]
        rows += _aggregate("d-sweep", repr(float(d)), trials, modes, cfg.rng_seed)
        all_trials += trials
    return BenchResult(rows, all_trials, {"skipped_communities": len(communities) - len(per_community)})


RUNNERS = {
    "single": run_single_recovery,
    "random-seeds": run_random_seed_bench,
    "local-seeds": run_local_seed_bench,
    "d-sweep": run_d_sweep,
}


def run_experiment(g: Graph, communities: CommunitySet, cfg: ExperimentConfig) -> BenchResult:
    result = RUNNERS[cfg.kind](g, communities, cfg)
    result.meta.update(
        config=_jsonable(asdict(cfg)),
        backend=backend_name(),
        nodes=g.node_count,
        edges=g.edge_count,
        communities=len(communities),
    )
    return result


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_results(result: BenchResult, out, per_trial: bool = False) -> list[Path]:
    """CSV of result rows, a ``.json`` metadata sidecar and optionally per-trial rows."""
    out = Path(out)
    written = [out, out.with_suffix(".json")]
    names = [f.name for f in fields(ResultRow)]
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in result.rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(row, n) for n in names)])
    with out.with_suffix(".json").open("w") as fh:
        json.dump(_jsonable(result.meta), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if per_trial:
        path = out.with_name(out.stem + ".trials.csv")
        algos = sorted({a for t in result.trials for a in t.scores})
        trials = sorted(result.trials, key=lambda t: (t.point, t.trial))
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["experiment", "point", "trial", "seeds", *algos])
            for t in trials:
                w.writerow([t.experiment, t.point, t.trial, t.seeds,
                            *(repr(t.scores[a]) if a in t.scores else "" for a in algos)])
        written.append(path)
    return written


def export_embedding(g: Graph, seeds, horizon: int, out, labels=None) -> int:
    """Write ``node_id,p1..pT[,label]`` for every embedded node; returns the row count.

    ``labels`` maps dense node id to a label string.
    """
    emb = compute_embedding(g, seeds, horizon)
    header = ["node_id"] + [f"p{t}" for t in range(1, horizon + 1)]
    if labels is not None:
        header.append("label")
    with Path(out).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for v, vec in zip(emb.nodes.tolist(), emb.vectors.tolist()):
            row = [int(g.ids[v]), *(repr(x) for x in vec)]
            if labels is not None:
                row.append(labels[v])
            w.writerow(row)
    return len(emb)
