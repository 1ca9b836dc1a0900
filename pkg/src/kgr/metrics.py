"""Graph similarity metrics between an original and a perturbed graph.

Three measures, each mapped into [0, 1]:

* ``ats``  -- aggregated triple score: mean plausibility of the second
  graph's triples under an edge scorer fitted to the first graph.
* ``sc2d`` -- similarity of mean per-relation local clustering vectors.
* ``sd2``  -- similarity of mean per-relation degree vectors.

The vector metrics compare |V|-dimensional vectors in the shared
lexicographic entity order (both graphs must have identical entity
sets).  A per-relation vector is averaged over the graph's own relation
set; the L2 distance d between the two means is mapped through
1 - d / (d + 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .graph import KnowledgeGraph, local_clustering, relation_subgraph


class EdgeScorer(Protocol):
    """Anything that can judge the plausibility of a directed triple."""

    def score(self, subject: str, relation: str, object_id: str) -> float: ...


@dataclass(frozen=True)
class BaselineEdgeScorer:
    """Relation-frequency scorer fitted on one graph.

    A triple present in the graph scores 1.  Otherwise the score is the
    mean of two frequencies: how often the relation labels the subject's
    out-edges and how often it labels the object's in-edges.  Entities
    without out-/in-edges contribute 0 to the respective half.
    """

    triples: frozenset
    out_freq: dict
    in_freq: dict
    kind: str = field(default="baseline_frequency", init=False)

    def score(self, subject: str, relation: str, object_id: str) -> float:
        if (subject, relation, object_id) in self.triples:
            return 1.0
        return 0.5 * (
            self.out_freq.get((subject, relation), 0.0)
            + self.in_freq.get((object_id, relation), 0.0)
        )


def fit_baseline_scorer(g: KnowledgeGraph) -> BaselineEdgeScorer:
    """Fit the frequency scorer; a graph without triples is rejected."""
    if not g.triples:
        raise ValueError("cannot fit an edge scorer on a graph without triples")
    out_counts: dict[tuple[str, str], int] = {}
    in_counts: dict[tuple[str, str], int] = {}
    for t in g.triples:
        out_counts[(t.subject, t.relation)] = out_counts.get((t.subject, t.relation), 0) + 1
        in_counts[(t.object, t.relation)] = in_counts.get((t.object, t.relation), 0) + 1
    out_freq = {
        key: count / len(g.out_index[key[0]]) for key, count in out_counts.items()
    }
    in_freq = {
        key: count / len(g.in_index[key[0]]) for key, count in in_counts.items()
    }
    return BaselineEdgeScorer(
        triples=frozenset((t.subject, t.relation, t.object) for t in g.triples),
        out_freq=out_freq,
        in_freq=in_freq,
    )


def ats(g: KnowledgeGraph, g_prime: KnowledgeGraph, scorer: EdgeScorer | None = None) -> float:
    """Mean plausibility of ``g_prime``'s triples under a scorer for ``g``.

    Defaults to the baseline frequency scorer fitted on ``g``.  An empty
    perturbed graph scores 0.
    """
    if scorer is None:
        scorer = fit_baseline_scorer(g)
    if not g_prime.triples:
        return 0.0
    total = sum(scorer.score(t.subject, t.relation, t.object) for t in g_prime.triples)
    return total / len(g_prime.triples)


def distance_to_similarity(d: float) -> float:
    """Map an L2 distance into (0, 1]: identical vectors give exactly 1."""
    return 1.0 - d / (d + 1.0)


def _require_same_entities(g: KnowledgeGraph, g_prime: KnowledgeGraph) -> None:
    if g.entities != g_prime.entities:
        raise ValueError("graphs must share the same entity set")


def mean_relation_clustering(g: KnowledgeGraph) -> np.ndarray:
    """Mean over relations of per-relation local clustering vectors.

    Entry i belongs to the i-th entity in lexicographic order.  A graph
    whose relation set is empty yields the zero vector.
    """
    order = g.entity_order
    acc = np.zeros(len(order), dtype=np.float64)
    relations = sorted(g.relations)
    if not relations:
        return acc
    for r in relations:
        sub = relation_subgraph(g, r)
        acc += np.array([local_clustering(sub, v) for v in order], dtype=np.float64)
    return acc / len(relations)


def mean_relation_degree(g: KnowledgeGraph) -> np.ndarray:
    """Mean over relations of per-relation undirected degree vectors.

    Each triple adds one to the degree of both endpoints inside its own
    relation subgraph (a self-loop therefore adds two to its node).
    """
    order = g.entity_order
    index = g.entity_index
    relations = sorted(g.relations)
    if not relations:
        return np.zeros(len(order), dtype=np.float64)
    acc = np.zeros(len(order), dtype=np.float64)
    for t in g.triples:
        acc[index[t.subject]] += 1.0
        acc[index[t.object]] += 1.0
    return acc / len(relations)


def sc2d(g: KnowledgeGraph, g_prime: KnowledgeGraph) -> float:
    """Similarity of mean per-relation clustering-coefficient vectors."""
    _require_same_entities(g, g_prime)
    d = float(np.linalg.norm(mean_relation_clustering(g) - mean_relation_clustering(g_prime)))
    return distance_to_similarity(d)


def sd2(g: KnowledgeGraph, g_prime: KnowledgeGraph) -> float:
    """Similarity of mean per-relation degree vectors."""
    _require_same_entities(g, g_prime)
    d = float(np.linalg.norm(mean_relation_degree(g) - mean_relation_degree(g_prime)))
    return distance_to_similarity(d)


@dataclass(frozen=True)
class SimilarityReport:
    ats: float
    sc2d: float
    sd2: float

    def to_json_dict(
        self,
        method: str | None = None,
        level: float | None = None,
        seed: int | None = None,
    ) -> dict:
        return {
            "ats": self.ats,
            "sc2d": self.sc2d,
            "sd2": self.sd2,
            "method": method,
            "level": level,
            "seed": seed,
        }


def compare(
    g: KnowledgeGraph, g_prime: KnowledgeGraph, scorer: EdgeScorer | None = None
) -> SimilarityReport:
    """All three similarity metrics between ``g`` and ``g_prime``."""
    return SimilarityReport(
        ats=ats(g, g_prime, scorer), sc2d=sc2d(g, g_prime), sd2=sd2(g, g_prime)
    )
