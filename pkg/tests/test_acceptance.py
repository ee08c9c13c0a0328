"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into an "acceptance criteria" section at the
end of the pytest run. Criterion 10 needs the SNAP DBLP/YouTube files and is
skipped unless their paths are given through the environment:

    WALKSCAN_DBLP_GRAPH, WALKSCAN_DBLP_CMTY, WALKSCAN_YOUTUBE_GRAPH, WALKSCAN_YOUTUBE_CMTY
"""

import os

import numpy as np
import pytest

from oracles import brute_components, brute_sweep, dense_walk, labels_to_groups, random_connected_graph, random_graph
from walkscan import bench
from walkscan.clustering import WalkscanParams, cluster_points, point_components, walkscan
from walkscan.embedding import compute_embedding
from walkscan.graph import Graph, load_communities, load_edge_list
from walkscan.metrics import conductance, conductance_report, f1_score
from walkscan.ranking import PageRankParams, pagerank_from_embedding, pagerank_scores, sweep
from walkscan.synthetic import planted_overlapping
from walkscan.toy import (
    REGIONS,
    SeedSplit,
    TwoCliqueSpec,
    closed_form_embedding,
    generate_two_cliques,
    perturb_add_external,
    perturb_remove_edges,
    separation_distances,
)

# Dense-walk oracle values for (5, 7, 2), a = b = 1, pinned after checking
# them against the 10-node dense matrix computation.
D1_SMALL = 1 / 28
D2_SMALL = 0.11378461572422789
D2_BOUND_SMALL = 0.12233332361119172


def measured_distances(g, spec, seeds):
    emb = compute_embedding(g, seeds, 2)
    v = {r: emb.vector(int(spec.region(r)[-1])) for r in REGIONS[:3]}
    d1 = float(np.linalg.norm(v["1not2"] - v["12"]))
    d2 = float(min(np.linalg.norm(v["2not1"] - v["1not2"]), np.linalg.norm(v["2not1"] - v["12"])))
    return d1, d2


def region_vectors(spec, node_count, split):
    cf = closed_form_embedding(spec, split)
    out = np.zeros((node_count, 2))
    for r in REGIONS[:3]:
        out[spec.region(r)] = cf.for_region(r)
    return out


def test_criterion_01_closed_form_exactness(criterion):
    rng = np.random.default_rng(101)
    specs = []
    while len(specs) < 20:
        o = int(rng.integers(3, 10))
        specs.append(TwoCliqueSpec(o + int(rng.integers(3, 30)), o + int(rng.integers(0, 30)), o))
    with criterion(1, "closed-form exactness, 20 specs x (a,b) in {0..3}^2, tol 1e-12", max_seconds=1.0) as rec:
        worst, count = 0.0, 0
        for spec in specs:
            g, _ = generate_two_cliques(spec)
            nodes = np.arange(g.node_count)
            for a in range(4):
                for b in range(4):
                    if a + b == 0:
                        continue
                    split = SeedSplit(a, b)
                    emb = compute_embedding(g, split.seeds(spec), 2)
                    err = np.abs(emb.vectors_for(nodes) - region_vectors(spec, g.node_count, split)).max()
                    worst = max(worst, float(err))
                    count += 1
        assert worst <= 1e-12, f"max deviation {worst:.3e}"
        rec["detail"] = f"{count} embeddings, max deviation {worst:.1e}"


def test_criterion_02_separation_distances(criterion):
    with criterion(2, "separation distances on (5,7,2), a=b=1") as rec:
        spec = TwoCliqueSpec(5, 7, 2)
        g, _ = generate_two_cliques(spec)
        seeds = SeedSplit(1, 1).seeds(spec)
        # the oracle first: dense matrix walk
        dense = dense_walk(g, seeds, 2)
        oracle_d1 = np.linalg.norm(dense[0] - dense[3])
        oracle_d2 = min(np.linalg.norm(dense[5] - dense[0]), np.linalg.norm(dense[5] - dense[3]))
        assert abs(oracle_d1 - D1_SMALL) <= 1e-12 and abs(oracle_d2 - D2_SMALL) <= 1e-12
        d1, d2 = measured_distances(g, spec, seeds)
        assert abs(d1 - 1 / 28) <= 1e-9, d1
        assert abs(d2 - 0.113785) <= 1e-6, d2
        dist = separation_distances(spec, SeedSplit(1, 1))
        assert abs(dist.d2_bound - 0.122333) <= 1e-6
        assert dist.d2_exact <= dist.d2_bound
        assert abs(dist.d2_exact - d2) <= 1e-12
        rec["detail"] = f"d1={d1:.10f} d2={d2:.10f} bound={dist.d2_bound:.6f}"


def test_criterion_03_regime_recovery(criterion):
    with criterion(3, "regime recovery on (50,40,10), a=5, b=1", max_seconds=1.0) as rec:
        spec, split = TwoCliqueSpec(50, 40, 10), SeedSplit(5, 1)
        g, _ = generate_two_cliques(spec)
        seeds = split.seeds(spec)
        d1, d2 = measured_distances(g, spec, seeds)
        three = [c.nodes.tolist() for c in walkscan(g, seeds, WalkscanParams(d1 / 2))]
        assert three == [spec.region("12").tolist(), spec.region("1not2").tolist(), spec.region("2not1").tolist()]
        two = [c.nodes.tolist() for c in walkscan(g, seeds, WalkscanParams((d1 + d2) / 2))]
        assert two == [spec.c1().tolist(), spec.region("2not1").tolist()]
        rec["detail"] = f"d1={d1:.6f} d2_exact={d2:.6f}"


def test_criterion_04_edge_removal_bound(criterion):
    spec, split = TwoCliqueSpec(50, 40, 10), SeedSplit(5, 0)
    g, _ = generate_two_cliques(spec)
    seeds = split.seeds(spec)
    _, d2 = measured_distances(g, spec, seeds)
    ideal = region_vectors(spec, g.node_count, split)
    nodes = np.arange(g.node_count)
    with criterion(4, "edge-removal bound, k=2, 100 rng seeds", max_seconds=5.0) as rec:
        worst = 0
        for rng_seed in range(100):
            h = perturb_remove_edges(g, spec, 2, rng_seed)
            shift = np.linalg.norm(compute_embedding(h, seeds, 2).vectors_for(nodes) - ideal, axis=1)
            worst = max(worst, int(np.count_nonzero(shift > d2)))
        assert worst <= 2, f"{worst} violating nodes"
        rec["detail"] = f"max violators per trial {worst} (allowed 2), d2_exact={d2:.6f}"


def test_criterion_05_external_edge_bound(criterion):
    spec, split = TwoCliqueSpec(50, 40, 10, n_background=20), SeedSplit(5, 0)
    g, _ = generate_two_cliques(spec)
    seeds = split.seeds(spec)
    _, d2 = measured_distances(g, spec, seeds)
    ideal = region_vectors(spec, g.node_count, split)
    cf = closed_form_embedding(spec, split)
    floor = min(cf.vec_12[1], cf.vec_1not2[1], cf.vec_2not1[1])
    inner, outer = np.arange(spec.union_size), spec.region("background")
    with criterion(5, "external-edge bound, l=2, 20 background nodes, 100 rng seeds", max_seconds=5.0) as rec:
        max_shift, max_bg = 0.0, 0.0
        for rng_seed in range(100):
            h = perturb_add_external(g, spec, 2, rng_seed)
            emb = compute_embedding(h, seeds, 2)
            shift = np.linalg.norm(emb.vectors_for(inner) - ideal[inner], axis=1)
            max_shift = max(max_shift, float(shift.max()))
            bg = emb.vectors_for(outer)
            reached = bg.any(axis=1)
            if reached.any():
                max_bg = max(max_bg, float(bg[reached, 1].max()))
        assert max_shift < d2, max_shift
        assert max_bg < floor, (max_bg, floor)
        rec["detail"] = f"max shift {max_shift:.5f} < {d2:.5f}; max background p2 {max_bg:.6f} < {floor:.6f}"


def test_criterion_06_pagerank_identity(criterion):
    rng = np.random.default_rng(606)
    graphs = []
    for _ in range(100):
        n = int(rng.integers(2, 51))
        g = random_connected_graph(rng, n, int(rng.integers(0, 3 * n)))
        graphs.append((g, rng.choice(n, size=int(rng.integers(1, min(5, n) + 1)), replace=False)))
    with criterion(6, "PageRank recursion equals embedding identity, 100 graphs, tol 1e-10", max_seconds=5.0) as rec:
        worst = 0.0
        for g, seeds in graphs:
            a = pagerank_scores(g, seeds, PageRankParams(0.85, 3))
            b = pagerank_from_embedding(compute_embedding(g, seeds, 3), seeds, 0.85)
            ra = dict(zip(a.nodes.tolist(), a.raw.tolist()))
            rb = dict(zip(b.nodes.tolist(), b.raw.tolist()))
            for v in set(ra) | set(rb):
                if v not in seeds:
                    worst = max(worst, abs(ra.get(v, 0.0) - rb.get(v, 0.0)))
        assert worst <= 1e-10, worst
        rec["detail"] = f"max |difference| {worst:.1e}"


def test_criterion_07_oracle_equivalences(criterion):
    rng = np.random.default_rng(707)
    with criterion(7, "sweep and cluster_points equal brute force (200 + 200 cases)", max_seconds=30.0) as rec:
        for _ in range(200):
            n = int(rng.integers(1, 13))
            g = random_graph(rng, n, rng.uniform(0.1, 0.8), loops=bool(rng.integers(2)))
            seeds = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
            ranked = rng.permutation([v for v in range(n) if v not in seeds]).tolist()
            assert sweep(g, seeds, ranked).tolist() == brute_sweep(g, seeds, ranked)
        for i in range(200):
            n, T = int(rng.integers(1, 501)), int(rng.integers(1, 4))
            if i % 3 == 0:
                pts, d = rng.integers(0, 6, size=(n, T)) * 0.125, 0.125 * int(rng.integers(1, 3))
            else:
                pts, d = rng.random((n, T)) ** 3, float(rng.uniform(0.005, 0.15))
            assert labels_to_groups(point_components(pts, d)) == brute_components(pts, d)
        rec["detail"] = "exact equality in all 400 cases"


def test_criterion_08_metric_hand_cases(criterion):
    with criterion(8, "f1_score and conductance hand cases") as rec:
        assert tuple(f1_score([1, 2, 3], [1, 2, 3]))[:3] == (1.0, 1.0, 1.0)
        assert tuple(f1_score([1, 2], [3, 4]))[:3] == (0.0, 0.0, 0.0)
        assert tuple(f1_score([0, 1, 2, 9], [0, 1, 2, 3, 4, 5]))[:3] == (0.75, 0.5, 0.6)
        triangle = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        assert conductance(triangle, [0]) == 1.0
        joined = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
        assert conductance(joined, [0, 1, 2]) == 1 / 7
        apart = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        assert conductance(apart, [0, 1, 2]) == 0.0
        assert conductance_report(triangle, []) == (1.0, True)
        rec["detail"] = "7 cases exact"


def test_criterion_09a_walkscan_score_nesting(criterion):
    with criterion("9a", "WS-Merge >= WS-Expert >= WS on every benchmark run") as rec:
        runs = 0
        for graph_seed in range(3):
            g, comms = planted_overlapping(10, 20, 5, 0.35, 60, graph_seed)
            for d in (0.003, 0.03, 0.1, 0.3):
                for k in (1, 2, 3):
                    cfg = bench.ExperimentConfig(
                        algorithms=("ws", "ws-expert", "ws-merge"), distance=d, expert_k=k, rng_seed=graph_seed)
                    result = bench.run_single_recovery(g, comms, cfg)
                    means = {r.algorithm: r.mean_f1 for r in result.rows}
                    assert means["ws-merge"] >= means["ws-expert"] >= means["ws"]
                    for t in result.trials:
                        assert t.scores["ws-merge"] >= t.scores["ws-expert"] >= t.scores["ws"]
                    runs += 1
        rec["detail"] = f"{runs} benchmark runs, every trial nested"


@pytest.mark.xfail(
    strict=True,
    reason="cores are components of size >= 2; a larger d can pair up former singletons, adding cores",
)
def test_criterion_09b_core_count_monotone_in_distance(criterion):
    with criterion("9b", "core count non-increasing in d on fixed embeddings") as rec:
        g, comms = planted_overlapping(10, 20, 5, 0.35, 60, 0)
        grid = np.logspace(-4, 0, 41)
        bad = []
        for i, c in enumerate(comms):
            emb = compute_embedding(g, c[:2], 2)
            counts = [len(cluster_points(emb, d).cores) for d in grid]
            rises = [(float(grid[j]), counts[j], counts[j + 1]) for j in range(len(grid) - 1) if counts[j + 1] > counts[j]]
            if rises:
                bad.append((i, rises[0]))
        rec["detail"] = f"{len(bad)} of {len(comms)} embeddings checked"
        assert not bad, f"core count rises on {len(bad)}/{len(comms)} embeddings, e.g. community {bad[0][0]} at d={bad[0][1][0]:.2e}: {bad[0][1][1]} -> {bad[0][1][2]}"


REFERENCE_F1 = {
    "dblp": {"pr": 0.716, "prt": 0.740, "lr": 0.713, "ws": 0.726, "ws-expert": 0.751, "ws-merge": 0.797},
    "youtube": {"pr": 0.465, "ws-merge": 0.530},
}


@pytest.mark.extended
@pytest.mark.parametrize("dataset", ["dblp", "youtube"])
def test_criterion_10_snap_reproduction(criterion, dataset):
    with criterion(10, f"{dataset} mean F1 within 0.05 of the reference values") as rec:
        gpath = os.environ.get(f"WALKSCAN_{dataset.upper()}_GRAPH")
        cpath = os.environ.get(f"WALKSCAN_{dataset.upper()}_CMTY")
        if not (gpath and cpath):
            pytest.skip(f"set WALKSCAN_{dataset.upper()}_GRAPH and WALKSCAN_{dataset.upper()}_CMTY")
        g = load_edge_list(gpath)
        comms = load_communities(cpath, g, 5000)
        cfg = bench.ExperimentConfig(workers=int(os.environ.get("WALKSCAN_WORKERS", "1")))
        result = bench.run_experiment(g, comms, cfg)
        means = {r.algorithm: r.mean_f1 for r in result.rows}
        for algo, bar in REFERENCE_F1[dataset].items():
            assert abs(means[algo] - bar) <= 0.05, (algo, means[algo], bar)
        assert means["ws-expert"] > means["pr"]
        rec["detail"] = " ".join(f"{a}={m:.3f}" for a, m in sorted(means.items()))
