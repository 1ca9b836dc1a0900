"""Personalized PageRank scoring and score-threshold pruning.

Power iteration of p = alpha * W p + (1 - alpha) * s, where W moves
probability mass along edge direction: column u of W spreads p[u] over
the out-edge multiset of u (parallel edges count with multiplicity).
Mass sitting on dangling nodes (no out-edges) is redistributed onto the
personalization vector s each step, so the scores always sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .graph import EntityNotFoundError, KnowledgeGraph


@dataclass(frozen=True)
class PprConfig:
    alpha: float = 0.85
    tol: float = 1e-6
    max_iter: int = 100
    prune_threshold: float = 1e-5

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.prune_threshold < 0.0:
            raise ValueError("prune_threshold must be non-negative")


@dataclass(frozen=True)
class PprScores:
    """Per-entity stationary scores plus iteration diagnostics."""

    scores: dict[str, float]
    iterations_used: int
    converged: bool


def _transition_matrix(
    g: KnowledgeGraph, undirected: bool
) -> tuple[sparse.csr_matrix, np.ndarray]:
    """Sparse W with W[v, u] = (# edges u->v) / outdeg(u), plus dangling mask."""
    n = len(g.entity_order)
    index = g.entity_index
    rows: list[int] = []
    cols: list[int] = []
    outdeg = np.zeros(n, dtype=np.float64)
    for t in g.triples:
        s, o = index[t.subject], index[t.object]
        rows.append(o)
        cols.append(s)
        outdeg[s] += 1.0
        if undirected:
            rows.append(s)
            cols.append(o)
            outdeg[o] += 1.0
    data = np.ones(len(rows), dtype=np.float64)
    for k, c in enumerate(cols):
        data[k] = 1.0 / outdeg[c]
    mat = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
    dangling = outdeg == 0.0
    return mat, dangling


def personalized_pagerank(
    g: KnowledgeGraph,
    seeds: Sequence[str],
    config: PprConfig = PprConfig(),
    undirected: bool = False,
) -> PprScores:
    """Run power iteration personalized on ``seeds`` (equal seed mass).

    Iterates until the L1 change drops below ``config.tol`` or
    ``config.max_iter`` sweeps have run.  The walk follows edge direction
    unless ``undirected`` is set.  Raises ``ValueError`` on an empty graph
    or empty seed list, ``EntityNotFoundError`` on unknown seeds.
    """
    if len(g.entities) == 0:
        raise ValueError("cannot rank an empty graph")
    if not seeds:
        raise ValueError("at least one seed entity is required")
    seed_set = set(seeds)
    for seed in seed_set:
        if seed not in g.entities:
            raise EntityNotFoundError(seed)

    n = len(g.entity_order)
    index = g.entity_index
    s = np.zeros(n, dtype=np.float64)
    share = 1.0 / len(seed_set)
    for seed in seed_set:
        s[index[seed]] = share

    mat, dangling = _transition_matrix(g, undirected)
    alpha = config.alpha
    p = s.copy()
    iterations = 0
    converged = False
    for iterations in range(1, config.max_iter + 1):
        dangling_mass = float(p[dangling].sum())
        p_next = alpha * (mat.dot(p) + dangling_mass * s) + (1.0 - alpha) * s
        delta = float(np.abs(p_next - p).sum())
        p = p_next
        if delta < config.tol:
            converged = True
            break
    scores = {e: float(p[i]) for i, e in enumerate(g.entity_order)}
    return PprScores(scores=scores, iterations_used=iterations, converged=converged)


def prune_by_ppr(
    g: KnowledgeGraph,
    scores: PprScores | dict[str, float],
    threshold: float = PprConfig().prune_threshold,
) -> KnowledgeGraph:
    """Drop entities scoring below ``threshold`` and their incident triples.

    Surviving nodes and edges are carried over unchanged; nodes left
    isolated by the cut remain in the graph.  Every entity must have a
    score entry (``ValueError`` otherwise).
    """
    table = scores.scores if isinstance(scores, PprScores) else scores
    missing = g.entities - table.keys()
    if missing:
        raise ValueError(
            f"scores missing for {len(missing)} entities, e.g. {sorted(missing)[:3]}"
        )
    kept = {e for e in g.entities if table[e] >= threshold}
    survivors = [t for t in g.triples if t.subject in kept and t.object in kept]
    return KnowledgeGraph.from_triples(survivors, extra_entities=kept)


def extract_and_prune(
    g: KnowledgeGraph,
    seeds: Iterable[str],
    hops: int = 2,
    config: PprConfig = PprConfig(),
    undirected: bool = False,
) -> KnowledgeGraph:
    """K-hop extraction around ``seeds`` followed by PPR pruning."""
    from .ingest import SubgraphRequest, khop_subgraph

    neighborhood = khop_subgraph(g, SubgraphRequest(tuple(seeds), hops))
    ranked = personalized_pagerank(neighborhood, list(seeds), config, undirected)
    return prune_by_ppr(neighborhood, ranked, config.prune_threshold)
