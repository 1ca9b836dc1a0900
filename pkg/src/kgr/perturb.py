"""Seeded structural perturbations of a knowledge graph.

Four heuristics, each parameterized by a level rho in [0, 1] and a seed:

* ``relation_swap``    -- disjoint edge pairs exchange their relations.
* ``relation_replace`` -- chosen edges get the least plausible other
  relation under an edge scorer (or the most plausible, behind a flag).
* ``edge_rewire``      -- chosen edges keep subject and relation but move
  their object to a uniformly drawn non-neighbor.
* ``edge_delete``      -- chosen edges are removed outright.

The entity set is never changed, every edit is logged, and replaying the
log against the original graph reproduces the perturbed graph exactly.
Edges are chosen by deterministically shuffling the canonical triple
order with the given seed, so equal inputs give equal outputs.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import KnowledgeGraph, Triple

METHOD_RELATION_SWAP = "relation_swap"
METHOD_RELATION_REPLACE = "relation_replace"
METHOD_EDGE_REWIRE = "edge_rewire"
METHOD_EDGE_DELETE = "edge_delete"
METHODS = (
    METHOD_RELATION_SWAP,
    METHOD_RELATION_REPLACE,
    METHOD_EDGE_REWIRE,
    METHOD_EDGE_DELETE,
)

_ALIASES = {
    "rs": METHOD_RELATION_SWAP,
    "rr": METHOD_RELATION_REPLACE,
    "er": METHOD_EDGE_REWIRE,
    "ed": METHOD_EDGE_DELETE,
}

REPLACE_LEAST_PLAUSIBLE = "least_plausible"
REPLACE_MOST_PLAUSIBLE = "most_plausible"

_SKIP_SUFFIX = "_skipped"


def normalize_method(name: str) -> str:
    """Accept both full method names and the two-letter shorthands."""
    lowered = name.strip().lower()
    if lowered in METHODS:
        return lowered
    if lowered in _ALIASES:
        return _ALIASES[lowered]
    raise ValueError(f"unknown perturbation method {name!r}")


def round_half_up(x: float) -> int:
    """Plain half-up rounding; Python's round() would round half to even."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class PerturbationSpec:
    method: str
    level: float
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", normalize_method(self.method))
        if not 0.0 <= self.level <= 1.0:
            raise ValueError("level must lie in [0, 1]")


@dataclass(frozen=True)
class EditRecord:
    """One applied (or skipped) edit; ``after`` is None for deletions."""

    op: str
    before: Triple
    after: Triple | None

    @property
    def skipped(self) -> bool:
        return self.op.endswith(_SKIP_SUFFIX)

    def to_json_dict(self) -> dict:
        return {
            "op": self.op,
            "before": list(self.before),
            "after": list(self.after) if self.after is not None else None,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "EditRecord":
        after = d.get("after")
        return cls(
            op=d["op"],
            before=Triple(*d["before"]),
            after=Triple(*after) if after is not None else None,
        )


@dataclass(frozen=True)
class PerturbedGraph:
    graph: KnowledgeGraph
    edit_log: tuple[EditRecord, ...]


def _shuffled_triples(g: KnowledgeGraph, seed: int) -> tuple[list[Triple], random.Random]:
    rng = random.Random(seed)
    order = list(g.triples)
    rng.shuffle(order)
    return order, rng


def _relation_swap(g: KnowledgeGraph, level: float, seed: int):
    shuffled, _ = _shuffled_triples(g, seed)
    n_pairs = min(round_half_up(level * len(shuffled) / 2.0), len(shuffled) // 2)
    current = set(g.triples)
    log: list[EditRecord] = []
    for i in range(n_pairs):
        e1, e2 = shuffled[2 * i], shuffled[2 * i + 1]
        f1 = Triple(e1.subject, e2.relation, e1.object)
        f2 = Triple(e2.subject, e1.relation, e2.object)
        swapped = (current - {e1, e2}) | {f1, f2}
        if len(swapped) != len(current):
            # The swap would collide with an existing triple and silently
            # shrink the graph; leave the pair untouched instead.
            log.append(EditRecord(METHOD_RELATION_SWAP + _SKIP_SUFFIX, e1, e1))
            log.append(EditRecord(METHOD_RELATION_SWAP + _SKIP_SUFFIX, e2, e2))
            continue
        current = swapped
        log.append(EditRecord(METHOD_RELATION_SWAP, e1, f1))
        log.append(EditRecord(METHOD_RELATION_SWAP, e2, f2))
    return current, log


def _relation_replace(
    g: KnowledgeGraph, level: float, seed: int, scorer, mode: str
):
    if mode not in (REPLACE_LEAST_PLAUSIBLE, REPLACE_MOST_PLAUSIBLE):
        raise ValueError(f"unknown replace mode {mode!r}")
    shuffled, _ = _shuffled_triples(g, seed)
    targets = shuffled[: round_half_up(level * len(shuffled))]
    relations = sorted(g.relations)
    current = set(g.triples)
    log: list[EditRecord] = []
    for e in targets:
        ranked = sorted(
            (
                (scorer.score(e.subject, r, e.object), r)
                for r in relations
                if r != e.relation
            ),
            key=(
                (lambda pair: (pair[0], pair[1]))
                if mode == REPLACE_LEAST_PLAUSIBLE
                else (lambda pair: (-pair[0], pair[1]))
            ),
        )
        replacement = None
        for _, r in ranked:
            candidate = Triple(e.subject, r, e.object)
            if candidate not in current:
                replacement = candidate
                break
        if replacement is None:
            log.append(EditRecord(METHOD_RELATION_REPLACE + _SKIP_SUFFIX, e, e))
            continue
        current = (current - {e}) | {replacement}
        log.append(EditRecord(METHOD_RELATION_REPLACE, e, replacement))
    return current, log


def _edge_rewire(g: KnowledgeGraph, level: float, seed: int):
    shuffled, rng = _shuffled_triples(g, seed)
    targets = shuffled[: round_half_up(level * len(shuffled))]
    current = set(g.triples)
    log: list[EditRecord] = []
    for e in targets:
        # Candidate objects exclude the subject and its original 1-hop
        # neighborhood (either direction), per the original graph.
        pool = sorted(g.entities - g.undirected_neighbors[e.subject] - {e.subject})
        rng.shuffle(pool)
        replacement = None
        for v3 in pool[:100]:
            candidate = Triple(e.subject, e.relation, v3)
            if candidate not in current:
                replacement = candidate
                break
        if replacement is None:
            log.append(EditRecord(METHOD_EDGE_REWIRE + _SKIP_SUFFIX, e, e))
            continue
        current = (current - {e}) | {replacement}
        log.append(EditRecord(METHOD_EDGE_REWIRE, e, replacement))
    return current, log


def _edge_delete(g: KnowledgeGraph, level: float, seed: int):
    shuffled, _ = _shuffled_triples(g, seed)
    removed = shuffled[: round_half_up(level * len(shuffled))]
    current = set(g.triples) - set(removed)
    log = [EditRecord(METHOD_EDGE_DELETE, e, None) for e in removed]
    return current, log


def perturb(
    g: KnowledgeGraph,
    spec: PerturbationSpec,
    scorer=None,
    replace_mode: str = REPLACE_LEAST_PLAUSIBLE,
) -> PerturbedGraph:
    """Apply one perturbation method at ``spec.level`` to ``g``.

    ``scorer`` is only consulted by ``relation_replace`` and defaults to
    the baseline frequency scorer fitted on ``g``.  The returned graph
    keeps the original entity set; all edits (and skips, e.g. when a
    rewire target pool is empty) are recorded in application order.
    """
    if spec.method == METHOD_RELATION_SWAP:
        triples, log = _relation_swap(g, spec.level, spec.seed)
    elif spec.method == METHOD_RELATION_REPLACE:
        if scorer is None:
            from .metrics import fit_baseline_scorer

            scorer = fit_baseline_scorer(g)
        triples, log = _relation_replace(g, spec.level, spec.seed, scorer, replace_mode)
    elif spec.method == METHOD_EDGE_REWIRE:
        triples, log = _edge_rewire(g, spec.level, spec.seed)
    elif spec.method == METHOD_EDGE_DELETE:
        triples, log = _edge_delete(g, spec.level, spec.seed)
    else:  # pragma: no cover - normalize_method already screens this
        raise ValueError(f"unknown method {spec.method!r}")
    graph = KnowledgeGraph.from_triples(triples, extra_entities=g.entities)
    return PerturbedGraph(graph=graph, edit_log=tuple(log))


def replay_edit_log(
    g: KnowledgeGraph, edit_log: Sequence[EditRecord]
) -> KnowledgeGraph:
    """Reapply a log to the graph it was produced from.

    Removals and additions are applied as one batch, which makes the
    replay insensitive to entries whose before/after triples overlap
    (e.g. a relation swap across parallel edges).
    """
    removed = {rec.before for rec in edit_log if not rec.skipped}
    added = {rec.after for rec in edit_log if not rec.skipped and rec.after is not None}
    triples = (set(g.triples) - removed) | added
    return KnowledgeGraph.from_triples(triples, extra_entities=g.entities)


def edit_log_to_jsonl(edit_log: Iterable[EditRecord]) -> str:
    return "".join(
        json.dumps(rec.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"
        for rec in edit_log
    )


def parse_edit_log(text: str) -> list[EditRecord]:
    """Parse a JSONL edit log, skipping blank and header lines.

    Log files written by the CLI open with a ``{"record_type": "header",
    ...}`` line describing the run; only edit records are returned.
    """
    records = []
    for line in text.splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        if isinstance(d, dict) and d.get("record_type") == "header":
            continue
        records.append(EditRecord.from_json_dict(d))
    return records
