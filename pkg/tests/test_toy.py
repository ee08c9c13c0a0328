import numpy as np
import pytest

from oracles import dense_walk
from walkscan.embedding import compute_embedding
from walkscan.ranking import lex_compare
from walkscan.toy import (
    REGIONS,
    SeedSplit,
    TwoCliqueSpec,
    closed_form_embedding,
    generate_two_cliques,
    perturb_add_external,
    perturb_remove_edges,
    perturbation_bounds,
    separation_distances,
)


def test_generator_degrees():
    spec = TwoCliqueSpec(5, 7, 2)
    g, labels = generate_two_cliques(spec)
    assert g.node_count == 10
    assert g.degree.tolist() == [5, 5, 5, 10, 10, 7, 7, 7, 7, 7]
    assert labels.tolist() == ["1not2"] * 3 + ["12"] * 2 + ["2not1"] * 5
    bare, _ = generate_two_cliques(TwoCliqueSpec(5, 7, 2, with_self_loops=False))
    assert bare.degree.tolist() == [4, 4, 4, 9, 9, 6, 6, 6, 6, 6]


def test_nested_clique_degenerates_to_one():
    spec = TwoCliqueSpec(6, 4, 4)
    g, _ = generate_two_cliques(spec)
    assert g.degree.tolist() == [6] * 6
    assert spec.region("2not1").size == 0


def test_spec_validation():
    for bad in ((5, 3, 4), (5, 7, 5), (5, 7, -1)):
        with pytest.raises(ValueError):
            TwoCliqueSpec(*bad)
    with pytest.raises(ValueError):
        SeedSplit(0, 1).seeds(TwoCliqueSpec(5, 7, 0))
    with pytest.raises(ValueError):
        SeedSplit(0, 0).seeds(TwoCliqueSpec(5, 7, 2))
    with pytest.raises(ValueError):
        closed_form_embedding(TwoCliqueSpec(5, 7, 2, with_self_loops=False), SeedSplit(1, 0))


def test_closed_form_examples():
    spec = TwoCliqueSpec(5, 7, 2)
    single = closed_form_embedding(spec, SeedSplit(1, 0))
    assert single.vec_1not2 == pytest.approx([0.2, 0.16], abs=1e-12)
    assert single.vec_12 == pytest.approx([0.2, 0.16], abs=1e-12)
    assert single.vec_2not1 == pytest.approx([0.0, 0.04], abs=1e-12)
    mixed = closed_form_embedding(spec, SeedSplit(1, 1))
    g, _ = generate_two_cliques(spec)
    dense = dense_walk(g, [0, 3], 2)
    assert mixed.vec_12 == pytest.approx(dense[3], abs=1e-12)
    assert mixed.vec_1not2 == pytest.approx(dense[0], abs=1e-12)
    assert mixed.vec_2not1 == pytest.approx(dense[5], abs=1e-12)
    assert mixed.vec_12 == pytest.approx([0.15, 0.1557142857142857], abs=1e-12)
    assert mixed.vec_1not2 == pytest.approx([0.15, 0.12], abs=1e-12)
    assert mixed.vec_2not1 == pytest.approx([0.05, 0.0657142857142857], abs=1e-12)
    only = closed_form_embedding(spec, SeedSplit(0, 1))
    u = spec.union_size
    a1, a2, b = only.alpha1, only.alpha2, only.beta
    assert only.vec_12 == pytest.approx(np.array([1, a1 + a2 + b]) / u, abs=1e-15)
    assert only.vec_1not2 == pytest.approx(np.array([1, a1 + b]) / u, abs=1e-15)
    assert only.vec_2not1 == pytest.approx(np.array([1, a2 + b]) / u, abs=1e-15)


def test_closed_forms_on_random_specs():
    rng = np.random.default_rng(31)
    for _ in range(30):
        o = int(rng.integers(1, 8))
        spec = TwoCliqueSpec(o + int(rng.integers(1, 20)), o + int(rng.integers(0, 20)), o)
        g, _ = generate_two_cliques(spec)
        for a in range(0, 4):
            for b in range(0, 4):
                split = SeedSplit(a, b)
                if a + b == 0 or a > spec.n1 - o or b > o:
                    continue
                cf = closed_form_embedding(spec, split)
                emb = compute_embedding(g, split.seeds(spec), 2)
                for r in REGIONS[:3]:
                    nodes = spec.region(r)
                    if nodes.size:
                        got = emb.vectors_for(nodes)
                        assert np.max(np.abs(got - cf.for_region(r))) <= 1e-12
                if a >= 1:
                    assert lex_compare(cf.vec_12, cf.vec_1not2) >= 0
                    assert lex_compare(cf.vec_1not2, cf.vec_2not1) == 1


def test_loop_free_graphs_track_closed_forms_within_3_over_n1():
    for n1, n2, o, a, b in [(50, 40, 10, 5, 1), (60, 60, 20, 3, 3), (40, 70, 5, 1, 0)]:
        spec = TwoCliqueSpec(n1, n2, o)
        bare = TwoCliqueSpec(n1, n2, o, with_self_loops=False)
        g, _ = generate_two_cliques(bare)
        split = SeedSplit(a, b)
        cf = closed_form_embedding(spec, split)
        seeds = split.seeds(bare)
        emb = compute_embedding(g, seeds, 2)
        for r in REGIONS[:3]:
            nodes = np.setdiff1d(spec.region(r), seeds)  # seeds have p1 = 0 without loops
            want = cf.for_region(r)
            got = emb.vectors_for(nodes)
            mask = want > 0
            assert np.all(np.abs(got[:, mask] - want[mask]) <= 3 / n1 * want[mask])


def test_separation_distance_examples():
    dist = separation_distances(TwoCliqueSpec(5, 7, 2), SeedSplit(1, 1))
    assert dist.d1 == pytest.approx(1 / 28, abs=1e-15)
    assert dist.d2_exact == pytest.approx(0.11378461572422789, abs=1e-12)
    assert dist.d2_bound == pytest.approx(0.12233332361119172, abs=1e-12)
    assert separation_distances(TwoCliqueSpec(5, 7, 2), SeedSplit(2, 0)).d1 == 0.0
    big = separation_distances(TwoCliqueSpec(50, 40, 10), SeedSplit(5, 1))
    assert big.d1 < big.d2_exact <= big.d2_bound


def test_bound_dominates_exact_everywhere():
    rng = np.random.default_rng(4)
    for _ in range(200):
        o = int(rng.integers(0, 10))
        spec = TwoCliqueSpec(o + int(rng.integers(1, 40)), o + int(rng.integers(1, 40)), o)
        a = int(rng.integers(0, spec.n1 - o + 1))
        b = int(rng.integers(0, o + 1))
        if a + b == 0:
            continue
        dist = separation_distances(spec, SeedSplit(a, b))
        assert dist.d2_exact <= dist.d2_bound + 1e-15


def test_edge_removal():
    spec = TwoCliqueSpec(5, 3, 0)
    g, _ = generate_two_cliques(spec)
    assert perturb_remove_edges(g, spec, 0, 1) is g
    h = perturb_remove_edges(g, spec, 1, 1)
    def intra(graph):
        return sum(1 for u, v in graph.edges().tolist() if u != v and v < 5)

    assert intra(g) == 10 and intra(h) == 9
    again = perturb_remove_edges(g, spec, 1, 1)
    assert np.array_equal(h.indices, again.indices)
    with pytest.raises(ValueError):
        perturb_remove_edges(g, spec, 100, 1)


def test_external_edges():
    spec = TwoCliqueSpec(5, 7, 2, n_background=4)
    g, _ = generate_two_cliques(spec)
    assert perturb_add_external(g, spec, 0, 3) is g
    h = perturb_add_external(g, spec, 1, 3)
    bg = spec.region("background")
    assert h.degree[bg].sum() == 1
    assert np.array_equal(h.indices, perturb_add_external(g, spec, 1, 3).indices)
    plain = TwoCliqueSpec(5, 7, 2)
    with pytest.raises(ValueError, match="background"):
        perturb_add_external(generate_two_cliques(plain)[0], plain, 1, 0)


def test_perturbation_bound_examples():
    spec = TwoCliqueSpec(50, 40, 10)
    removed = perturbation_bounds(spec, 5, 2, "removed")
    assert removed.eps1A_max == pytest.approx(10 / 2400, abs=1e-15)
    assert removed.eps2B_max == 2 / 2500
    external = perturbation_bounds(spec, 5, 3, "external")
    assert external.eps1_in_max == pytest.approx(15 / 2650, abs=1e-15)
    assert external.eps1_out_max == 3 / 50
    zero = perturbation_bounds(spec, 5, 0, "removed")
    assert zero.eps1A_max == zero.eps2A == zero.eps2B_max == 0.0
    with pytest.raises(ValueError):
        perturbation_bounds(spec, 5, 50, "removed")
    with pytest.raises(ValueError):
        perturbation_bounds(spec, 5, 1, "rewired")
