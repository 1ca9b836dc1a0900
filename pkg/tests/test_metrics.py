"""Similarity metrics: frozen hand-derived values and contract checks."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from kgr.graph import KnowledgeGraph
from kgr.metrics import (
    ats,
    compare,
    distance_to_similarity,
    fit_baseline_scorer,
    mean_relation_clustering,
    mean_relation_degree,
    sc2d,
    sd2,
)
from kgr.perturb import METHODS, PerturbationSpec, perturb
from conftest import random_graph


def test_distance_to_similarity_anchors():
    assert distance_to_similarity(0.0) == 1.0
    assert distance_to_similarity(1.0) == 0.5
    assert distance_to_similarity(3.0) == 0.25


def test_baseline_scorer_frequencies():
    g = KnowledgeGraph.from_triples(
        [
            ("a", "likes", "b"),
            ("a", "likes", "c"),
            ("a", "hates", "d"),
            ("x", "likes", "b"),
        ]
    )
    scorer = fit_baseline_scorer(g)
    assert scorer.score("a", "likes", "b") == 1.0  # present
    # Absent (a, likes, d): a's out-edges are 2/3 "likes"; d has no
    # incoming "likes", so that half contributes 0.
    assert scorer.score("a", "likes", "d") == pytest.approx(0.5 * (2 / 3 + 0))
    # Absent (x, hates, b): 0 out-frequency, b receives no "hates".
    assert scorer.score("x", "hates", "b") == 0.0
    # Absent (a, hates, b): out 1/3, in 0.
    assert scorer.score("a", "hates", "b") == pytest.approx(0.5 * (1 / 3))
    assert scorer.score("nobody", "likes", "nothing") == 0.0


def test_fit_rejects_empty_graph():
    with pytest.raises(ValueError):
        fit_baseline_scorer(KnowledgeGraph.from_triples([], extra_entities=["a"]))


def test_ats_identity_is_one():
    rng = random.Random(113)
    for _ in range(10):
        g = random_graph(rng, 10, 20)
        assert ats(g, g) == 1.0


def test_ats_empty_perturbed_graph_is_zero():
    g = KnowledgeGraph.from_triples([("a", "r", "b")])
    empty = KnowledgeGraph.from_triples([], extra_entities=g.entities)
    assert ats(g, empty) == 0.0


def test_ats_matches_hand_recount():
    g = KnowledgeGraph.from_triples(
        [("a", "r1", "b"), ("b", "r1", "c"), ("c", "r2", "a")]
    )
    g_prime = KnowledgeGraph.from_triples(
        [("a", "r1", "b"), ("b", "r2", "c"), ("c", "r2", "b")],
        extra_entities=g.entities,
    )
    # Recount from scratch: out/in frequencies of g, averaged per triple.
    def freq_score(s, r, o):
        if (s, r, o) in {(t.subject, t.relation, t.object) for t in g.triples}:
            return 1.0
        outs = [t for t in g.triples if t.subject == s]
        ins = [t for t in g.triples if t.object == o]
        f_out = sum(t.relation == r for t in outs) / len(outs) if outs else 0.0
        f_in = sum(t.relation == r for t in ins) / len(ins) if ins else 0.0
        return 0.5 * (f_out + f_in)

    expected = sum(
        freq_score(t.subject, t.relation, t.object) for t in g_prime.triples
    ) / len(g_prime.triples)
    assert ats(g, g_prime) == pytest.approx(expected)
    assert 0.0 < ats(g, g_prime) < 1.0


def test_structural_identity_is_one():
    rng = random.Random(127)
    for _ in range(10):
        g = random_graph(rng, 8, 16)
        assert sc2d(g, g) == 1.0
        assert sd2(g, g) == 1.0


def test_sc2d_triangle_vs_path_frozen():
    # One relation; the triangle's clustering vector is (1,1,1), the
    # path's is (0,0,0), so d = sqrt(3) and the similarity is 1/(1+sqrt(3)).
    triangle = KnowledgeGraph.from_triples(
        [("A", "r", "B"), ("B", "r", "C"), ("C", "r", "A")]
    )
    path = KnowledgeGraph.from_triples(
        [("A", "r", "B"), ("B", "r", "C")], extra_entities=["C"]
    )
    expected = 1.0 / (1.0 + math.sqrt(3.0))
    assert sc2d(triangle, path) == pytest.approx(expected, abs=1e-12)


def test_sd2_self_loop_frozen_half():
    # Two relations; the only difference is one self-loop, which raises a
    # single mean-degree entry by exactly 2/2 = 1, giving d = 1 -> 0.5.
    g = KnowledgeGraph.from_triples([("A", "r1", "B"), ("A", "r2", "B")])
    g_prime = KnowledgeGraph.from_triples(
        [("A", "r1", "B"), ("A", "r2", "B"), ("A", "r1", "A")]
    )
    assert sd2(g, g_prime) == pytest.approx(0.5, abs=1e-12)


def test_mean_relation_vectors_directly():
    # r1 forms a triangle (clustering 1 everywhere), r2 a path (all 0).
    g = KnowledgeGraph.from_triples(
        [
            ("A", "r1", "B"),
            ("B", "r1", "C"),
            ("C", "r1", "A"),
            ("A", "r2", "B"),
            ("B", "r2", "C"),
        ]
    )
    np.testing.assert_allclose(mean_relation_clustering(g), [0.5, 0.5, 0.5])
    # Degrees: A and C carry 2+1 endpoints, B carries 2+2, over 2 relations.
    np.testing.assert_allclose(mean_relation_degree(g), [1.5, 2.0, 1.5])


def test_zero_relation_graph_gives_zero_vectors():
    g = KnowledgeGraph.from_triples([], extra_entities=["a", "b"])
    np.testing.assert_array_equal(mean_relation_clustering(g), [0.0, 0.0])
    np.testing.assert_array_equal(mean_relation_degree(g), [0.0, 0.0])
    assert sd2(g, g) == 1.0


def test_entity_mismatch_rejected():
    g = KnowledgeGraph.from_triples([("a", "r", "b")])
    h = KnowledgeGraph.from_triples([("a", "r", "c")])
    with pytest.raises(ValueError):
        sc2d(g, h)
    with pytest.raises(ValueError):
        sd2(g, h)


def test_relation_swap_keeps_sd2_exactly_one():
    # Swapping relations never moves an endpoint, so the degree vector of
    # every node -- and hence SD2 -- is untouched, for any level or seed.
    for seed in range(10):
        g = random_graph(random.Random(600 + seed), 10, 22, n_relations=4)
        for level in (0.2, 0.6, 1.0):
            perturbed = perturb(g, PerturbationSpec("rs", level, seed)).graph
            assert sd2(g, perturbed) == 1.0


def test_all_metrics_bounded_under_random_perturbation():
    rng = random.Random(131)
    for _ in range(50):
        g = random_graph(rng, rng.randint(3, 10), rng.randint(2, 18))
        method = rng.choice(METHODS)
        spec = PerturbationSpec(method, rng.random(), rng.randint(0, 999))
        perturbed = perturb(g, spec).graph
        report = compare(g, perturbed)
        for value in (report.ats, report.sc2d, report.sd2):
            assert 0.0 <= value <= 1.0


def test_report_json_dict():
    g = KnowledgeGraph.from_triples([("a", "r", "b")])
    report = compare(g, g)
    d = report.to_json_dict(method="edge_delete", level=0.5, seed=3)
    assert d == {
        "ats": 1.0,
        "sc2d": 1.0,
        "sd2": 1.0,
        "method": "edge_delete",
        "level": 0.5,
        "seed": 3,
    }
