"""Command-line entry point.

    walkscan bench {single,random-seeds,local-seeds,d-sweep} --graph G --communities C --out R.csv
    walkscan calibrate --graph G --communities C
    walkscan run --graph G --algo ws --seeds 12,40
    walkscan embed --graph G --seeds 12,40 --horizon 2 --out emb.csv
    walkscan toy --n1 5 --n2 7 --overlap 2 --a 1 --b 1

Failures exit with status 1 (2 for usage errors) after printing one JSON
line ``{"error": ..., "message": ...}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from walkscan import bench
from walkscan.clustering import (
    DEFAULT_DISTANCE,
    WalkscanParams,
    evaluate_expert,
    evaluate_merge,
    union_all,
    walkscan,
)
from walkscan.graph import CommunitySet, load_communities, load_edge_list, write_edge_list
from walkscan.metrics import f1_score
from walkscan.ranking import (
    PageRankParams,
    calibrate_threshold,
    lexrank_community,
    pagerank_community,
    pagerank_scores,
    pagerank_threshold,
)
from walkscan.toy import (
    SeedSplit,
    TwoCliqueSpec,
    closed_form_embedding,
    generate_two_cliques,
    separation_distances,
)

log = logging.getLogger("walkscan")


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _add_graph_args(p, communities=True):
    p.add_argument("--graph", required=True, help="edge list (SNAP format)")
    if communities:
        p.add_argument("--communities", required=True, help="one community per line")
        p.add_argument("--max-communities", type=int, default=5000)


def _add_pr_args(p):
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--horizon", type=int, default=None,
                   help="walk length for pr/prt/lr (default 3) or ws (default 2)")
    p.add_argument("--degree-normalized", action="store_true", help="rank by r_T(v)/d(v)")
    p.add_argument("--objective", choices=["conductance"], default="conductance")


def _add_ws_args(p):
    p.add_argument("--distance", type=float, default=DEFAULT_DISTANCE)
    p.add_argument("--ws-horizon", type=int, default=2)
    p.add_argument("--expert-k", type=int, default=2)


def build_parser():
    parser = argparse.ArgumentParser(prog="walkscan", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("kind", choices=list(bench.RUNNERS))
    _add_graph_args(b)
    _add_pr_args(b)
    _add_ws_args(b)
    b.add_argument("--algos", default=",".join(bench.ALGORITHMS))
    b.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="fixed PRT threshold; calibrated on even-indexed communities if omitted")
    b.add_argument("--seed-fraction", type=float, default=0.1)
    b.add_argument("--runs", type=int, default=1000)
    b.add_argument("--k-values", type=_ints, default=(1, 2, 3, 4, 5))
    b.add_argument("--l-values", type=_ints, default=(1, 2, 3))
    b.add_argument("--d-values", type=_floats, default=bench.DEFAULT_D_GRID)
    b.add_argument("--rng-seed", type=int, default=0)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--per-trial", action="store_true", help="also write <out>.trials.csv")
    b.add_argument("--out", required=True)

    c = sub.add_parser("calibrate", help="fit the PageRankThreshold lambda")
    _add_graph_args(c)
    _add_pr_args(c)
    c.add_argument("--seed-fraction", type=float, default=0.1)
    c.add_argument("--rng-seed", type=int, default=0)
    c.add_argument("--all", action="store_true", help="train on every community, not the even half")

    r = sub.add_parser("run", help="one algorithm on one seed set")
    _add_graph_args(r, communities=False)
    _add_pr_args(r)
    _add_ws_args(r)
    r.add_argument("--algo", choices=["pr", "prt", "lr", "ws"], required=True)
    r.add_argument("--seeds", type=_ints, required=True, help="comma-separated original node ids")
    r.add_argument("--lambda", dest="lam", type=float, default=None)
    r.add_argument("--mode", choices=["ws", "ws-expert", "ws-merge", "union", "all"], default="all")
    r.add_argument("--target", type=_ints, default=None, help="target community for ws-expert/ws-merge")

    e = sub.add_parser("embed", help="export the random-walk embedding as CSV")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--toy", type=_ints, help="n1,n2,overlap of a self-loop two-clique graph")
    e.add_argument("--seeds", type=_ints, help="original node ids (with --graph)")
    e.add_argument("--a", type=int, default=1, help="toy seeds in C1 minus C2")
    e.add_argument("--b", type=int, default=0, help="toy seeds in the overlap")
    e.add_argument("--communities", help="label nodes by the communities containing them")
    e.add_argument("--horizon", type=int, default=2)
    e.add_argument("--out", required=True)

    t = sub.add_parser("toy", help="two-clique model: graph, regions, closed forms")
    t.add_argument("--n1", type=int, required=True)
    t.add_argument("--n2", type=int, required=True)
    t.add_argument("--overlap", type=int, required=True)
    t.add_argument("--a", type=int, default=1)
    t.add_argument("--b", type=int, default=0)
    t.add_argument("--no-self-loops", action="store_true")
    t.add_argument("--background", type=int, default=0)
    t.add_argument("--edges-out", help="write the generated graph as an edge list")
    t.add_argument("--out", help="write the JSON report here instead of stdout")
    return parser


def _pr_params(args, default_horizon=3):
    return PageRankParams(args.alpha, args.horizon or default_horizon, args.degree_normalized)


def _load(args):
    g = load_edge_list(args.graph)
    comms = load_communities(args.communities, g, args.max_communities) if getattr(args, "communities", None) else None
    return g, comms


def cmd_bench(args):
    g, comms = _load(args)
    cfg = bench.ExperimentConfig(
        kind=args.kind,
        algorithms=tuple(a for a in args.algos.split(",") if a),
        seed_fraction=args.seed_fraction,
        expert_k=args.expert_k,
        distance=args.distance,
        alpha=args.alpha,
        pr_horizon=args.horizon or 3,
        ws_horizon=args.ws_horizon,
        degree_normalized=args.degree_normalized,
        lam=args.lam,
        k_values=args.k_values,
        l_values=args.l_values,
        d_values=args.d_values,
        runs=args.runs,
        rng_seed=args.rng_seed,
        workers=args.workers,
        graph_path=args.graph,
        communities_path=args.communities,
        max_communities=args.max_communities,
    )
    result = bench.run_experiment(g, comms, cfg)
    for path in bench.write_results(result, args.out, per_trial=args.per_trial):
        log.info("wrote %s", path)
    for row in result.rows:
        print(f"{row.experiment}\t{row.point}\t{row.algorithm}\t{row.mean_f1:.4f}\t(n={row.trials})")


def cmd_calibrate(args):
    g, comms = _load(args)
    training = comms if args.all else CommunitySet(tuple(comms[i] for i in range(0, len(comms), 2)))
    lam = calibrate_threshold(g, training, _pr_params(args), args.seed_fraction, args.rng_seed)
    print(json.dumps({"lambda": lam, "training_communities": len(training)}))


def cmd_run(args):
    g, _ = _load(args)
    seeds = g.to_dense_ids(args.seeds)
    out = {"algo": args.algo, "seeds": args.seeds}
    if args.algo == "pr":
        out["community"] = pagerank_community(g, seeds, _pr_params(args))
    elif args.algo == "prt":
        if args.lam is None:
            raise ValueError("--lambda is required for prt")
        out["community"] = pagerank_threshold(pagerank_scores(g, seeds, _pr_params(args)), seeds, args.lam)
    elif args.algo == "lr":
        out["community"] = lexrank_community(g, seeds, args.horizon or 3)
    else:
        comms = walkscan(g, seeds, WalkscanParams(args.distance, args.horizon or args.ws_horizon))
        if args.mode == "all":
            out["communities"] = [c.nodes for c in comms]
            out["means"] = [c.mean.tolist() for c in comms]
        elif args.mode == "union":
            out["community"] = union_all(comms)
        elif args.mode == "ws":
            out["community"] = np.union1d(comms[0].nodes, seeds) if comms else seeds
        else:
            if args.target is None:
                raise ValueError(f"--target is required for mode {args.mode}")
            target = g.to_dense_ids(args.target)
            if args.mode == "ws-expert":
                f1, idx = evaluate_expert(comms, target, args.expert_k, seeds)
                best = seeds if idx is None else np.union1d(comms[idx].nodes, seeds)
            else:
                f1, pair = evaluate_merge(comms, target, args.expert_k, seeds)
                best = seeds if pair is None else np.union1d(
                    np.union1d(comms[pair[0]].nodes, comms[pair[1]].nodes), seeds)
            out["community"] = best
            out["f1"] = f1
    if args.target is not None and "community" in out and "f1" not in out:
        out["f1"] = f1_score(out["community"], g.to_dense_ids(args.target)).f1
    for key in ("community",):
        if key in out:
            out[key] = g.to_original_ids(out[key]).tolist()
    if "communities" in out:
        out["communities"] = [g.to_original_ids(c).tolist() for c in out["communities"]]
    print(json.dumps(out))


def cmd_embed(args):
    if args.toy:
        if len(args.toy) != 3:
            raise ValueError("--toy expects n1,n2,overlap")
        spec = TwoCliqueSpec(*args.toy)
        g, labels = generate_two_cliques(spec)
        seeds = SeedSplit(args.a, args.b).seeds(spec)
    else:
        g = load_edge_list(args.graph)
        if not args.seeds:
            raise ValueError("--seeds is required with --graph")
        seeds = g.to_dense_ids(args.seeds)
        labels = None
        if args.communities:
            comms = load_communities(args.communities, g)
            member = [[] for _ in range(g.node_count)]
            for j, c in enumerate(comms):
                for v in c.tolist():
                    member[v].append(str(j))
            labels = [";".join(m) for m in member]
    n = bench.export_embedding(g, seeds, args.horizon, args.out, labels)
    print(json.dumps({"rows": n, "horizon": args.horizon, "out": args.out}))


def cmd_toy(args):
    spec = TwoCliqueSpec(args.n1, args.n2, args.overlap, not args.no_self_loops, args.background)
    split = SeedSplit(args.a, args.b)
    g, labels = generate_two_cliques(spec)
    report = {
        "spec": {"n1": spec.n1, "n2": spec.n2, "overlap": spec.overlap,
                 "with_self_loops": spec.with_self_loops, "n_background": spec.n_background},
        "split": {"a": split.a, "b": split.b},
        "seeds": split.seeds(spec).tolist(),
        "nodes": g.node_count,
        "edges": g.edge_count,
        "regions": {name: spec.region(name).tolist() for name in ("1not2", "12", "2not1", "background")},
        "labels": labels.tolist(),
    }
    if spec.with_self_loops:
        emb = closed_form_embedding(spec, split)
        dist = separation_distances(spec, split)
        report["vectors"] = {"12": emb.vec_12.tolist(), "1not2": emb.vec_1not2.tolist(),
                             "2not1": emb.vec_2not1.tolist()}
        report["ratios"] = {"alpha1": emb.alpha1, "alpha2": emb.alpha2, "beta": emb.beta}
        report["distances"] = dist._asdict()
    if args.edges_out:
        write_edge_list(g, args.edges_out)
        report["edges_out"] = args.edges_out
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


COMMANDS = {
    "bench": cmd_bench,
    "calibrate": cmd_calibrate,
    "run": cmd_run,
    "embed": cmd_embed,
    "toy": cmd_toy,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError) as exc:
        kind = type(exc).__name__
        message = f"unknown node id {exc.args[0]}" if isinstance(exc, KeyError) else str(exc)
        print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
