"""Triple file parsing, canonical serialization, and K-hop extraction.

Two line-oriented formats are supported:

* ``tsv``: ``subject<TAB>relation<TAB>object`` per line, UTF-8, no quoting.
* ``nt``: an N-Triples subset where all three terms are IRIs in angle
  brackets and each statement ends with `` .``.  Literal objects are
  rejected (this library stores entity-to-entity edges only).

Canonical serialization is the TSV format with triples in lexicographic
order, so serializing the same graph always yields identical bytes.
Isolated entities have no representation in the triple formats and are
dropped on a serialize/parse round trip.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import IO, Iterable

from .graph import EntityNotFoundError, KnowledgeGraph, Triple

FORMAT_TSV = "tsv"
FORMAT_NT = "nt"
FORMATS = (FORMAT_TSV, FORMAT_NT)

_NT_LINE = re.compile(
    r"^<([^<>\s]+)>\s+<([^<>\s]+)>\s+<([^<>\s]+)>\s*\.$"
)


class ParseError(ValueError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


def _decode(source: str | bytes | IO) -> str:
    if isinstance(source, str):
        return source
    if isinstance(source, bytes):
        try:
            return source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    data = source.read()
    return _decode(data)


def _parse_tsv_line(line: str, lineno: int) -> Triple:
    fields = line.split("\t")
    if len(fields) != 3:
        raise ParseError(
            f"expected 3 tab-separated fields, got {len(fields)}", lineno
        )
    s, r, o = fields
    if not s or not r or not o:
        raise ParseError("empty field in triple", lineno)
    return Triple(s, r, o)


def _parse_nt_line(line: str, lineno: int) -> Triple:
    m = _NT_LINE.match(line)
    if not m:
        if '"' in line:
            raise ParseError("literal terms are not supported", lineno)
        raise ParseError("not a valid IRI triple statement", lineno)
    return Triple(m.group(1), m.group(2), m.group(3))


def parse_triples(source: str | bytes | IO, fmt: str = FORMAT_TSV) -> KnowledgeGraph:
    """Parse a triple file into a graph, deduplicating exact repeats.

    ``source`` may be text, bytes, or a file-like object.  Blank lines are
    skipped; ``nt`` additionally skips ``#`` comment lines.  The first
    malformed line raises :class:`ParseError` with its line number.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    text = _decode(source)
    triples: list[Triple] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if fmt == FORMAT_TSV:
            if not line.strip():
                continue
            triples.append(_parse_tsv_line(line, lineno))
        else:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            triples.append(_parse_nt_line(stripped, lineno))
    return KnowledgeGraph.from_triples(triples)


def serialize(g: KnowledgeGraph) -> str:
    """Canonical TSV serialization: sorted triples, LF line endings."""
    return "".join(f"{t.subject}\t{t.relation}\t{t.object}\n" for t in g.triples)


def read_graph(path: str, fmt: str = FORMAT_TSV) -> KnowledgeGraph:
    with open(path, "rb") as fh:
        return parse_triples(fh, fmt)


def write_graph(path: str, g: KnowledgeGraph) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize(g))


@dataclass(frozen=True)
class SubgraphRequest:
    """Seed entities plus a hop budget for neighborhood extraction."""

    seeds: tuple[str, ...]
    hops: int = 2

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ValueError("at least one seed entity is required")
        if self.hops < 0:
            raise ValueError("hops must be >= 0")


def khop_subgraph(g: KnowledgeGraph, request: SubgraphRequest) -> KnowledgeGraph:
    """Neighborhood of the seeds within ``hops`` undirected steps.

    A triple is kept exactly when both endpoints lie within the hop budget
    of some seed.  Seeds are always part of the result, even when no triple
    survives.  Unknown seeds raise ``EntityNotFoundError``.
    """
    for seed in request.seeds:
        if seed not in g.entities:
            raise EntityNotFoundError(seed)
    dist: dict[str, int] = {s: 0 for s in request.seeds}
    queue = deque(request.seeds)
    while queue:
        v = queue.popleft()
        d = dist[v]
        if d == request.hops:
            continue
        for u in g.undirected_neighbors[v]:
            if u not in dist:
                dist[u] = d + 1
                queue.append(u)
    kept = [t for t in g.triples if t.subject in dist and t.object in dist]
    return KnowledgeGraph.from_triples(kept, extra_entities=request.seeds)


def triples_from_lines(lines: Iterable[tuple[str, str, str]]) -> KnowledgeGraph:
    """Convenience builder used by tests and demo scripts."""
    return KnowledgeGraph.from_triples(lines)
