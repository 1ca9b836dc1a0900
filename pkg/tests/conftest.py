"""Shared test helpers: seeded random graphs and a local mock HTTP server."""

from __future__ import annotations

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from kgr.graph import KnowledgeGraph


def random_graph(
    rng: random.Random,
    n_nodes: int,
    n_edges: int,
    n_relations: int = 3,
    allow_self_loops: bool = False,
) -> KnowledgeGraph:
    """Random multigraph over entities e0..e{n-1} and relations r0..r{k-1}."""
    nodes = [f"e{i}" for i in range(n_nodes)]
    relations = [f"r{i}" for i in range(n_relations)]
    triples = set()
    attempts = 0
    while len(triples) < n_edges and attempts < n_edges * 20:
        attempts += 1
        s = rng.choice(nodes)
        o = rng.choice(nodes)
        if not allow_self_loops and s == o:
            continue
        triples.add((s, rng.choice(relations), o))
    return KnowledgeGraph.from_triples(triples, extra_entities=nodes)


class _MockHandler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 - http.server API
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length) or b"{}")
        self.server.last_auth = self.headers.get("Authorization")  # type: ignore[attr-defined]
        status, body = self.server.behavior(payload)  # type: ignore[attr-defined]
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):  # silence test output
        pass


class MockService:
    """Tiny local HTTP JSON endpoint with a swappable behavior function.

    ``behavior(payload) -> (status, body_dict)`` runs per request; the
    call count is tracked so tests can assert on retries.
    """

    def __init__(self, behavior):
        self.calls = 0
        self._behavior = behavior
        self._lock = threading.Lock()
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), _MockHandler)
        self._server.behavior = self._count_and_run
        self._server.last_auth = None
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def last_auth(self):
        return self._server.last_auth

    def _count_and_run(self, payload):
        with self._lock:
            self.calls += 1
        return self._behavior(payload)

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}/"

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def mock_service():
    started: list[MockService] = []

    def factory(behavior) -> MockService:
        service = MockService(behavior)
        started.append(service)
        return service

    yield factory
    for service in started:
        service.close()


def echo_generation_behavior(payload):
    """Standard echo mock: answers with a digest of the prompt."""
    prompt = payload.get("prompt", "")
    return 200, {"text": f"ECHO[{len(prompt)}]: {prompt[:80]}", "model": "echo-mock"}
