"""Directed labeled multigraph model for knowledge graphs.

A graph is an immutable collection of (subject, relation, object) triples
plus an entity set that may contain isolated nodes.  Exact duplicate
triples are collapsed on construction and the triple tuple is kept in
lexicographic order, so equal graphs have identical internal layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple


class EntityNotFoundError(KeyError):
    """Raised when an entity id is not present in a graph."""


class RelationNotFoundError(KeyError):
    """Raised when a relation id is not present in a graph."""


class Triple(NamedTuple):
    """One directed labeled edge."""

    subject: str
    relation: str
    object: str


@dataclass(frozen=True, eq=False)
class KnowledgeGraph:
    """Immutable directed multigraph with string entity/relation ids.

    Build instances through :meth:`from_triples`; the constructor itself
    assumes already-normalized fields.  All derived indexes are computed
    lazily and cached, which is safe because instances never mutate.
    """

    entities: frozenset[str]
    relations: frozenset[str]
    triples: tuple[Triple, ...]

    @classmethod
    def from_triples(
        cls,
        triples: Iterable[tuple[str, str, str]],
        extra_entities: Iterable[str] = (),
        extra_relations: Iterable[str] = (),
    ) -> "KnowledgeGraph":
        """Create a graph from triples, deduplicating and sorting them.

        ``extra_entities`` / ``extra_relations`` add members that have no
        supporting triple (isolated nodes, orphan relation labels).
        Raises ``ValueError`` on empty ids.
        """
        seen: set[Triple] = set()
        for item in triples:
            t = item if isinstance(item, Triple) else Triple(*item)
            if not t.subject or not t.relation or not t.object:
                raise ValueError(f"triple with empty field: {t!r}")
            seen.add(t)
        extra_e = set(extra_entities)
        extra_r = set(extra_relations)
        if "" in extra_e or "" in extra_r:
            raise ValueError("empty entity or relation id")
        ordered = tuple(sorted(seen))
        entities = frozenset(
            {t.subject for t in ordered} | {t.object for t in ordered} | extra_e
        )
        relations = frozenset({t.relation for t in ordered} | extra_r)
        return cls(entities=entities, relations=relations, triples=ordered)

    # -- equality is content equality: same entity set, same triple set.
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self.entities == other.entities and self.triples == other.triples

    def __hash__(self) -> int:
        return hash((self.entities, self.triples))

    def __repr__(self) -> str:
        return (
            f"KnowledgeGraph(|V|={len(self.entities)}, "
            f"|R|={len(self.relations)}, |T|={len(self.triples)})"
        )

    @property
    def num_entities(self) -> int:
        return len(self.entities)

    @property
    def num_triples(self) -> int:
        return len(self.triples)

    @cached_property
    def entity_order(self) -> tuple[str, ...]:
        """Entities in stable lexicographic order (index space for vectors)."""
        return tuple(sorted(self.entities))

    @cached_property
    def entity_index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.entity_order)}

    @cached_property
    def out_index(self) -> dict[str, tuple[Triple, ...]]:
        """Out-edges per entity; every entity has an entry (possibly empty)."""
        acc: dict[str, list[Triple]] = {e: [] for e in self.entities}
        for t in self.triples:
            acc[t.subject].append(t)
        return {e: tuple(ts) for e, ts in acc.items()}

    @cached_property
    def in_index(self) -> dict[str, tuple[Triple, ...]]:
        acc: dict[str, list[Triple]] = {e: [] for e in self.entities}
        for t in self.triples:
            acc[t.object].append(t)
        return {e: tuple(ts) for e, ts in acc.items()}

    @cached_property
    def undirected_neighbors(self) -> dict[str, frozenset[str]]:
        """1-hop neighbor sets ignoring direction; v appears only via self-loop."""
        acc: dict[str, set[str]] = {e: set() for e in self.entities}
        for t in self.triples:
            acc[t.subject].add(t.object)
            acc[t.object].add(t.subject)
        return {e: frozenset(ns) for e, ns in acc.items()}

    @cached_property
    def simple_neighbors(self) -> dict[str, frozenset[str]]:
        """Undirected simple projection: neighbor sets with self-loops dropped."""
        return {
            e: frozenset(n for n in ns if n != e)
            for e, ns in self.undirected_neighbors.items()
        }


@dataclass(frozen=True)
class GraphStats:
    """Basic whole-graph statistics."""

    node_count: int
    edge_count: int
    avg_degree: float
    clustering_coefficient: float
    density: float

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "avg_degree": self.avg_degree,
            "clustering_coefficient": self.clustering_coefficient,
            "density": self.density,
        }


def _require_entity(g: KnowledgeGraph, entity: str) -> None:
    if entity not in g.entities:
        raise EntityNotFoundError(entity)


def neighbors_1hop(g: KnowledgeGraph, entity: str) -> set[str]:
    """All entities one undirected hop from ``entity``.

    The result never contains ``entity`` itself unless a self-loop exists.
    """
    _require_entity(g, entity)
    return set(g.undirected_neighbors[entity])


def local_clustering(g: KnowledgeGraph, entity: str) -> float:
    """Local clustering coefficient on the undirected simple projection.

    c(v) = 2 * tri(v) / (deg(v) * (deg(v) - 1)), and 0.0 when deg(v) < 2.
    Self-loops are ignored.
    """
    _require_entity(g, entity)
    adj = g.simple_neighbors
    nbrs = adj[entity]
    deg = len(nbrs)
    if deg < 2:
        return 0.0
    ordered = sorted(nbrs)
    tri = 0
    for i, u in enumerate(ordered):
        u_adj = adj[u]
        for w in ordered[i + 1 :]:
            if w in u_adj:
                tri += 1
    return 2.0 * tri / (deg * (deg - 1))


def relation_subgraph(g: KnowledgeGraph, relation: str) -> KnowledgeGraph:
    """Subgraph keeping only triples labeled ``relation``.

    The entity set is preserved verbatim, so per-relation vectors stay
    comparable across relations.  Unknown relation raises
    ``RelationNotFoundError``.
    """
    if relation not in g.relations:
        raise RelationNotFoundError(relation)
    kept = [t for t in g.triples if t.relation == relation]
    return KnowledgeGraph.from_triples(
        kept, extra_entities=g.entities, extra_relations=(relation,)
    )


def graph_stats(g: KnowledgeGraph) -> GraphStats:
    """Node/edge counts, average degree, mean clustering, and density.

    Average degree and clustering use the undirected simple projection;
    density uses the directed simple projection (self-loops excluded).
    An empty graph yields all-zero statistics.
    """
    n = len(g.entities)
    if n == 0:
        return GraphStats(0, 0, 0.0, 0.0, 0.0)
    undirected_simple = {
        frozenset((t.subject, t.object)) for t in g.triples if t.subject != t.object
    }
    directed_simple = {
        (t.subject, t.object) for t in g.triples if t.subject != t.object
    }
    avg_degree = 2.0 * len(undirected_simple) / n
    clustering = sum(local_clustering(g, v) for v in g.entity_order) / n
    density = len(directed_simple) / (n * (n - 1)) if n > 1 else 0.0
    return GraphStats(
        node_count=n,
        edge_count=len(g.triples),
        avg_degree=avg_degree,
        clustering_coefficient=clustering,
        density=density,
    )
