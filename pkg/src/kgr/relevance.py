"""Embedding providers, cosine ranking, and rank-based prize assignment.

Graph elements (entities and triples) are verbalized to short text,
embedded alongside the query, ranked by cosine similarity, and the top
ranks receive integer prizes k, k-1, ..., 1.  Two providers exist: a
remote HTTP service and a fully deterministic hashed bag-of-tokens
fallback that needs no network at all.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graph import Triple
from .transport import (
    DEFAULT_BACKOFF,
    DEFAULT_MAX_ATTEMPTS,
    DEFAULT_TIMEOUT,
    post_json,
    TransportError,
)

EMBED_URL_ENV = "KGR_EMBED_URL"
EMBED_TOKEN_ENV = "KGR_EMBED_TOKEN"

FALLBACK_DIMENSION = 256
SERVICE_BATCH_SIZE = 128

_TOKEN = re.compile(r"[a-z0-9]+")


def element_label(element_id: str) -> str:
    """Human-readable label for an entity or relation id.

    IRI ids keep only the final path fragment; underscores become spaces.
    """
    tail = element_id.rstrip("/#")
    for sep in ("#", "/"):
        if sep in tail:
            tail = tail.rsplit(sep, 1)[1]
    tail = tail or element_id
    return tail.replace("_", " ")


def verbalize_element(element: str | Triple) -> str:
    """Text form of a graph element: entity label, or the three labels
    of a triple joined by spaces."""
    if isinstance(element, Triple):
        return " ".join(
            element_label(part) for part in (element.subject, element.relation, element.object)
        )
    return element_label(element)


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def _token_bucket(token: str, dimension: int) -> tuple[int, float]:
    digest = hashlib.sha1(token.encode("utf-8")).digest()
    idx = int.from_bytes(digest[:4], "big") % dimension
    sign = 1.0 if digest[4] & 1 else -1.0
    return idx, sign


@dataclass(frozen=True)
class HashedBagEmbedder:
    """Deterministic offline embedder: signed hashed bag of tokens.

    Token order does not matter and no state is ever learned, so equal
    texts map to bit-identical unit vectors on every platform.
    """

    dimension: int = FALLBACK_DIMENSION
    kind: str = field(default="deterministic_fallback", init=False)

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self._embed_one(t) for t in texts]

    def _embed_one(self, text: str) -> np.ndarray:
        if not text or not text.strip():
            raise ValueError("cannot embed empty text")
        toks = _tokens(text)
        if not toks:
            # Punctuation-only input still deserves a stable direction.
            toks = [text.strip()]
        vec = np.zeros(self.dimension, dtype=np.float64)
        for tok in toks:
            idx, sign = _token_bucket(tok, self.dimension)
            vec[idx] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            # Signed counts cancelled out; fall back to an unsigned bag.
            for tok in toks:
                idx, _ = _token_bucket(tok, self.dimension)
                vec[idx] += 1.0
            norm = float(np.linalg.norm(vec))
        return vec / norm


@dataclass(frozen=True)
class ServiceEmbedder:
    """Remote embedding endpoint speaking ``{"texts": [...]}`` ->
    ``{"vectors": [[...]]}``, batched and retried with backoff."""

    url: str
    token: str | None = None
    batch_size: int = SERVICE_BATCH_SIZE
    timeout: float = DEFAULT_TIMEOUT
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    backoff: float = DEFAULT_BACKOFF
    kind: str = field(default="external_service", init=False)

    @classmethod
    def from_env(cls, **overrides) -> "ServiceEmbedder":
        url = os.environ.get(EMBED_URL_ENV, "")
        if not url:
            raise ValueError(f"{EMBED_URL_ENV} is not set")
        token = os.environ.get(EMBED_TOKEN_ENV) or None
        return cls(url=url, token=token, **overrides)

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        for t in texts:
            if not t or not t.strip():
                raise ValueError("cannot embed empty text")
        out: list[np.ndarray] = []
        for start in range(0, len(texts), self.batch_size):
            batch = list(texts[start : start + self.batch_size])
            body, _ = post_json(
                self.url,
                {"texts": batch},
                token=self.token,
                timeout=self.timeout,
                max_attempts=self.max_attempts,
                backoff=self.backoff,
            )
            vectors = body.get("vectors")
            if not isinstance(vectors, list) or len(vectors) != len(batch):
                raise TransportError(
                    "malformed embedding response: expected one vector per text",
                    attempts=self.max_attempts,
                )
            for row in vectors:
                vec = np.asarray(row, dtype=np.float64)
                if vec.ndim != 1 or vec.size == 0:
                    raise TransportError(
                        "malformed embedding response: bad vector shape",
                        attempts=self.max_attempts,
                    )
                norm = float(np.linalg.norm(vec))
                if norm == 0.0:
                    raise TransportError(
                        "malformed embedding response: zero vector",
                        attempts=self.max_attempts,
                    )
                out.append(vec / norm)
        return out


def default_embedder() -> HashedBagEmbedder | ServiceEmbedder:
    """Service embedder when KGR_EMBED_URL is set, else the offline one."""
    if os.environ.get(EMBED_URL_ENV):
        return ServiceEmbedder.from_env()
    return HashedBagEmbedder()


def embed_texts(provider, texts: Sequence[str]) -> list[np.ndarray]:
    """Embed a non-empty list of non-empty texts into unit vectors."""
    if not texts:
        raise ValueError("texts must be non-empty")
    return provider.embed(texts)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    denom = float(np.linalg.norm(a)) * float(np.linalg.norm(b))
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)


def rank_elements(query_vec: np.ndarray, element_vecs: Mapping) -> list[tuple]:
    """Sort elements by descending cosine similarity to the query.

    Ties break on the lexicographic element id, so equal inputs always
    produce the same ranking.  Returns ``(element, similarity)`` pairs.
    """
    scored = [(elem, cosine(query_vec, vec)) for elem, vec in element_vecs.items()]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


@dataclass(frozen=True)
class PrizeAssignment:
    """Integer prizes for ranked nodes/edges plus the uniform edge cost.

    Rank i (1-based) earns ``max(0, k - i + 1)``; anything unranked is
    worth nothing.  Maps may hold scaled (non-integer) values when a
    caller rescales an assignment, the accessors do not care.
    """

    node_prizes: dict[str, float]
    edge_prizes: dict[Triple, float]
    edge_cost: float = 1.0
    k: int = 15

    def node_prize(self, entity: str) -> float:
        return self.node_prizes.get(entity, 0.0)

    def edge_prize(self, triple: Triple) -> float:
        return self.edge_prizes.get(triple, 0.0)


def prize_for_rank(rank: int, k: int) -> int:
    """Prize of the element at 1-based ``rank``: max(0, k - rank + 1)."""
    if rank < 1:
        raise ValueError("rank is 1-based")
    return max(0, k - rank + 1)


def assign_prizes(
    ranked_nodes: Sequence[str],
    ranked_edges: Sequence[Triple],
    k: int = 15,
    edge_cost: float = 1.0,
) -> PrizeAssignment:
    """Turn two ranked lists into a prize assignment with shared ``k``.

    ``ranked_*`` must already be in descending relevance order (as
    returned by :func:`rank_elements`).  ``k`` must be >= 1 and
    ``edge_cost`` positive.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if edge_cost <= 0.0:
        raise ValueError("edge_cost must be positive")
    node_prizes = {
        node: float(prize_for_rank(i, k))
        for i, node in enumerate(ranked_nodes[:k], start=1)
    }
    edge_prizes = {
        edge: float(prize_for_rank(i, k))
        for i, edge in enumerate(ranked_edges[:k], start=1)
    }
    return PrizeAssignment(
        node_prizes=node_prizes, edge_prizes=edge_prizes, edge_cost=edge_cost, k=k
    )


def rank_graph_elements(g, query: str, provider=None) -> tuple[list[str], list[Triple]]:
    """Rank a graph's entities and triples against a query text.

    Returns ``(ranked_nodes, ranked_edges)`` id lists, most relevant
    first.  Uses the deterministic fallback embedder unless a provider is
    given.
    """
    provider = provider or HashedBagEmbedder()
    nodes = list(g.entity_order)
    edges = list(g.triples)
    texts = [query] + [verbalize_element(n) for n in nodes] + [
        verbalize_element(e) for e in edges
    ]
    vectors = embed_texts(provider, texts)
    qv = vectors[0]
    node_vecs = dict(zip(nodes, vectors[1 : 1 + len(nodes)]))
    edge_vecs = dict(zip(edges, vectors[1 + len(nodes) :]))
    ranked_nodes = [n for n, _ in rank_elements(qv, node_vecs)]
    ranked_edges = [e for e, _ in rank_elements(qv, edge_vecs)]
    return ranked_nodes, ranked_edges
