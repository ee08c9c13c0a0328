"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py --communities 200 --size 40 --repeat 5

Each kernel runs once untimed (JIT warm-up), then ``--repeat`` times; the
best wall time is reported. Outputs are compared for bitwise equality.
"""

import argparse
import time

import numpy as np

from walkscan import kernels
from walkscan._jit import NUMBA_AVAILABLE
from walkscan.embedding import compute_embedding
from walkscan.ranking import pagerank_scores, rank_by_score
from walkscan.synthetic import planted_overlapping


def best_time(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--communities", type=int, default=200)
    p.add_argument("--size", type=int, default=40)
    p.add_argument("--overlap", type=int, default=8)
    p.add_argument("--p-in", type=float, default=0.3)
    p.add_argument("--external", type=int, default=2000)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--rng-seed", type=int, default=0)
    args = p.parse_args(argv)

    if not NUMBA_AVAILABLE:
        print("numba not installed: the numba column runs interpreted")
    g, comms = planted_overlapping(
        args.communities, args.size, args.overlap, args.p_in, args.external, args.rng_seed
    )
    rng = np.random.default_rng(args.rng_seed)
    seeds = np.sort(rng.choice(comms[0], size=min(args.seeds, comms[0].size), replace=False))
    print(f"graph: {g.node_count} nodes, {g.edge_count} edges, {seeds.size} seeds")

    # a wide frontier: the support after three steps
    emb = compute_embedding(g, seeds, 3)
    frontier = emb.nodes
    mass = np.full(frontier.size, 1.0 / frontier.size)
    ranked = rank_by_score(pagerank_scores(g, seeds))
    points = compute_embedding(g, seeds, 2).vectors
    points = np.unique(points, axis=0)
    d = 0.01

    cases = {
        "push": (
            lambda: kernels.push_numba(g.indptr, g.indices, g.degree, frontier, mass),
            lambda: kernels.push_numpy(g.indptr, g.indices, g.degree, frontier, mass),
            f"{frontier.size} frontier nodes",
        ),
        "sweep_conductance": (
            lambda: kernels.sweep_conductance_numba(
                g.indptr, g.indices, g.degree, g.loops, seeds, ranked, g.total_volume),
            lambda: kernels.sweep_conductance_numpy(
                g.indptr, g.indices, g.degree, g.loops, seeds, ranked, g.total_volume),
            f"{ranked.size} ranked nodes",
        ),
        "grid_components": (
            lambda: kernels.grid_components_numba(points, d),
            lambda: kernels.grid_components_numpy(points, d),
            f"{points.shape[0]} points, d={d}",
        ),
    }
    print(f"{'kernel':<18} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}  equal  workload")
    for name, (fast, slow, note) in cases.items():
        t_fast = best_time(fast, args.repeat)
        t_slow = best_time(slow, args.repeat)
        ok = same(fast(), slow())
        print(f"{name:<18} {t_fast * 1e3:>10.3f} {t_slow * 1e3:>10.3f} {t_slow / t_fast:>8.1f}  {str(ok):<5}  {note}")


if __name__ == "__main__":
    main()
