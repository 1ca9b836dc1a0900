"""Retrieval variants against frozen cases and exhaustive oracles."""

from __future__ import annotations

import random

import pytest

from kgr.graph import KnowledgeGraph, Triple
from kgr.relevance import PrizeAssignment
from kgr.retrieval import (
    RetrievedKnowledge,
    ScoredPath,
    ScoredSubgraph,
    brute_force_best_path,
    brute_force_best_subgraph,
    retrieve,
    retrieve_paths,
    retrieve_subgraph_pcst,
    retrieve_triplets,
    retrieved_from_json_dict,
)
from conftest import random_graph


def prizes_of(nodes=None, edges=None, cost=1.0, k=15):
    return PrizeAssignment(
        node_prizes=dict(nodes or {}),
        edge_prizes=dict(edges or {}),
        edge_cost=cost,
        k=k,
    )


def random_prizes(rng, g, cost=1.0):
    nodes = {v: float(rng.randint(0, 5)) for v in g.entities if rng.random() < 0.7}
    edges = {t: float(rng.randint(1, 4)) for t in g.triples if rng.random() < 0.3}
    return prizes_of(nodes, edges, cost=cost)


def assert_connected(g: KnowledgeGraph):
    nodes = sorted(g.entities)
    seen = {nodes[0]}
    frontier = [nodes[0]]
    while frontier:
        v = frontier.pop()
        for u in g.simple_neighbors[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    assert seen == g.entities, "retrieved subgraph is not connected"


CHAIN = KnowledgeGraph.from_triples([("A", "r", "B"), ("B", "r", "C")])


def test_chain_best_path_frozen_score():
    # Node prizes 3, 2, 1 on A-B-C with unit edge costs: A-B collects 5
    # and pays 1, A-B-C collects 6 and pays 2 -- both score 4, and the
    # shorter node sequence wins the tie.
    prizes = prizes_of({"A": 3.0, "B": 2.0, "C": 1.0})
    paths = retrieve_paths(CHAIN, prizes, start_count=3, max_len=4, result_count=3)
    assert paths[0].score == pytest.approx(4.0)
    assert paths[0].nodes == ("A", "B")
    assert paths[1].score == pytest.approx(4.0)
    assert paths[1].nodes == ("A", "B", "C")
    oracle = brute_force_best_path(CHAIN, prizes)
    assert oracle.score == pytest.approx(4.0)


def test_triplets_rank_by_summed_prize():
    g = KnowledgeGraph.from_triples(
        [("A", "r", "B"), ("B", "r", "C"), ("C", "r", "D")]
    )
    prizes = prizes_of({"A": 5.0, "B": 1.0}, {Triple("C", "r", "D"): 10.0})
    result = retrieve_triplets(g, prizes, n=2)
    assert [t for t, _ in result.triplets] == [
        Triple("C", "r", "D"),
        Triple("A", "r", "B"),
    ]
    assert [s for _, s in result.triplets] == [10.0, 6.0]


def test_triplets_tie_breaks_lexicographic():
    g = KnowledgeGraph.from_triples([("B", "r", "B2"), ("A", "r", "A2")])
    result = retrieve_triplets(g, prizes_of(), n=2)
    assert [t.subject for t, _ in result.triplets] == ["A", "B"]


def test_triplets_n_larger_than_graph():
    result = retrieve_triplets(CHAIN, prizes_of(), n=50)
    assert len(result.triplets) == 2


def test_paths_respect_max_len_and_simplicity():
    rng = random.Random(67)
    for _ in range(15):
        g = random_graph(rng, 8, 18)
        prizes = random_prizes(rng, g)
        for p in retrieve_paths(g, prizes, start_count=8, max_len=3, result_count=50):
            assert len(p.edges) <= 3
            assert len(set(p.nodes)) == len(p.nodes)
            # Every edge really joins consecutive nodes, in either direction.
            for (a, b), t in zip(zip(p.nodes, p.nodes[1:]), p.edges):
                assert {t.subject, t.object} == {a, b} or (
                    t.subject == t.object == a == b
                )


def test_paths_match_exhaustive_oracle_when_all_starts_allowed():
    rng = random.Random(71)
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 8), rng.randint(1, 16))
        prizes = random_prizes(rng, g, cost=rng.choice([0.5, 1.0, 2.0]))
        top = retrieve_paths(
            g, prizes, start_count=len(g.entities), max_len=4, result_count=1
        )[0]
        oracle = brute_force_best_path(g, prizes, max_len=4)
        assert top.score == pytest.approx(oracle.score, abs=1e-9)


def test_paths_few_starts_can_be_suboptimal_but_never_better():
    rng = random.Random(73)
    for _ in range(20):
        g = random_graph(rng, 8, 14)
        prizes = random_prizes(rng, g)
        greedy = retrieve_paths(g, prizes, start_count=2, max_len=4, result_count=1)
        oracle = brute_force_best_path(g, prizes, max_len=4)
        assert greedy[0].score <= oracle.score + 1e-9


def test_paths_directed_only_flag():
    g = KnowledgeGraph.from_triples([("B", "r", "A"), ("C", "r", "B")])
    prizes = prizes_of({"A": 3.0, "B": 2.0, "C": 1.0})
    free = retrieve_paths(g, prizes, start_count=1, max_len=4, result_count=1)
    forced = retrieve_paths(
        g, prizes, start_count=1, max_len=4, result_count=1, directed_only=True
    )
    # The single start is A (top prize), which has no outgoing edges:
    # only the direction-blind walk can move off it.
    assert free[0].score == pytest.approx(4.0)
    assert len(free[0].edges) == 1
    assert forced[0].nodes == ("A",)
    assert forced[0].score == pytest.approx(3.0)


def test_paths_deterministic():
    rng = random.Random(79)
    g = random_graph(rng, 10, 25)
    prizes = random_prizes(rng, g)
    a = retrieve_paths(g, prizes, result_count=10)
    b = retrieve_paths(g, prizes, result_count=10)
    assert a == b


def test_pcst_star_keeps_center_alone():
    star = KnowledgeGraph.from_triples([("hub", "r", f"leaf{i}") for i in range(4)])
    result = retrieve_subgraph_pcst(star, prizes_of({"hub": 5.0}))
    assert result.subgraph.entities == {"hub"}
    assert result.subgraph.triples == ()
    assert result.score == pytest.approx(5.0)


def test_pcst_picks_best_component():
    g = KnowledgeGraph.from_triples([("A", "r", "B"), ("X", "r", "Y")])
    prizes = prizes_of({"A": 4.0, "B": 3.0, "X": 2.0, "Y": 2.0})
    result = retrieve_subgraph_pcst(g, prizes)
    assert result.subgraph.entities == {"A", "B"}
    assert result.score == pytest.approx(6.0)
    assert_connected(result.subgraph)


def test_pcst_no_prizes_degenerates_to_hub_node():
    star = KnowledgeGraph.from_triples([("hub", "r", f"leaf{i}") for i in range(3)])
    result = retrieve_subgraph_pcst(star, prizes_of())
    assert result.subgraph.entities == {"hub"}
    assert result.score == 0.0


def test_pcst_expensive_edge_keeps_single_node():
    g = KnowledgeGraph.from_triples([("A", "r", "B")])
    result = retrieve_subgraph_pcst(g, prizes_of({"A": 1.0, "B": 1.0}, cost=5.0))
    assert len(result.subgraph.entities) == 1
    assert result.score == pytest.approx(1.0)


def test_pcst_edge_prize_pays_for_crossing():
    g = KnowledgeGraph.from_triples([("A", "r", "B")])
    t = Triple("A", "r", "B")
    result = retrieve_subgraph_pcst(g, prizes_of({}, {t: 3.0}, cost=1.0))
    assert result.subgraph.entities == {"A", "B"}
    assert result.subgraph.triples == (t,)
    assert result.score == pytest.approx(2.0)


def test_pcst_near_optimal_and_connected_on_random_instances():
    rng = random.Random(83)
    for _ in range(30):
        g = random_graph(rng, rng.randint(2, 10), rng.randint(1, 20))
        prizes = random_prizes(rng, g, cost=rng.choice([0.5, 1.0, 2.0]))
        got = retrieve_subgraph_pcst(g, prizes)
        opt = brute_force_best_subgraph(g, prizes)
        assert got.score <= opt.score + 1e-9
        assert got.score >= 0.9 * opt.score - 1e-9
        assert_connected(got.subgraph)


def test_pcst_scale_equivariant():
    rng = random.Random(89)
    g = random_graph(rng, 9, 16)
    prizes = random_prizes(rng, g)
    doubled = PrizeAssignment(
        node_prizes={v: 2.0 * p for v, p in prizes.node_prizes.items()},
        edge_prizes={t: 2.0 * p for t, p in prizes.edge_prizes.items()},
        edge_cost=2.0 * prizes.edge_cost,
        k=prizes.k,
    )
    a = retrieve_subgraph_pcst(g, prizes)
    b = retrieve_subgraph_pcst(g, doubled)
    assert b.subgraph == a.subgraph
    assert b.score == pytest.approx(2.0 * a.score)


def test_oracles_refuse_large_graphs():
    rng = random.Random(97)
    g = random_graph(rng, 11, 15)
    with pytest.raises(ValueError):
        brute_force_best_path(g, prizes_of())
    with pytest.raises(ValueError):
        brute_force_best_subgraph(g, prizes_of())


def test_scored_path_validates_lengths():
    with pytest.raises(ValueError):
        ScoredPath(nodes=("A", "B"), edges=(), score=0.0)


def test_retrieved_knowledge_exactly_one_payload():
    with pytest.raises(ValueError):
        RetrievedKnowledge(variant="triplets", prize_k=15, edge_cost=1.0)
    with pytest.raises(ValueError):
        RetrievedKnowledge(
            variant="triplets",
            prize_k=15,
            edge_cost=1.0,
            triplets=(),
            paths=(),
        )
    with pytest.raises(ValueError):
        RetrievedKnowledge(variant="nonsense", prize_k=15, edge_cost=1.0, triplets=())


def test_retrieve_wrapper_and_json_round_trip():
    rng = random.Random(101)
    g = random_graph(rng, 8, 14)
    prizes = random_prizes(rng, g)
    for variant in ("triplets", "paths", "subgraph"):
        result = retrieve(g, prizes, variant=variant)
        assert result.variant == variant
        restored = retrieved_from_json_dict(result.to_json_dict())
        assert restored == result
        assert restored.retrieved_triples() == result.retrieved_triples()
    with pytest.raises(ValueError):
        retrieve(g, prizes, variant="bogus")


def test_retrieved_triples_per_variant():
    prizes = prizes_of({"A": 3.0, "B": 2.0, "C": 1.0})
    t_ab, t_bc = Triple("A", "r", "B"), Triple("B", "r", "C")
    trip = retrieve(CHAIN, prizes, variant="triplets", n=1)
    assert trip.retrieved_triples() == {t_ab}
    paths = retrieve(CHAIN, prizes, variant="paths", result_count=2)
    assert paths.retrieved_triples() == {t_ab, t_bc}
    sub = retrieve(CHAIN, prizes, variant="subgraph")
    assert sub.retrieved_triples() <= {t_ab, t_bc}
