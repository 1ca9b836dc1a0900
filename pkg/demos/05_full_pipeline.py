"""
The whole pipeline against a local mock answer endpoint
=======================================================

extract -> retrieve -> prompt -> generate, hermetically: the "model"
below is an in-process HTTP server that echoes a digest of the prompt,
standing in for a real completion endpoint (same wire contract:
POST {"prompt", "temperature", "top_p"} -> {"text", "model"}).
"""

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from kgr import (
    GenerationClient,
    KnowledgeGraph,
    assign_prizes,
    build_prompt,
    extract_and_prune,
    rank_graph_elements,
    retrieve,
)


class EchoHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        prompt = body["prompt"]
        reply = {
            "text": f"(mock answer grounded in {prompt.count('(')} facts)",
            "model": "demo-echo",
        }
        data = json.dumps(reply).encode()
        self.send_response(200)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


server = ThreadingHTTPServer(("127.0.0.1", 0), EchoHandler)
threading.Thread(target=server.serve_forever, daemon=True).start()
url = f"http://127.0.0.1:{server.server_address[1]}/"

# A synthetic corpus graph: 300 triples over 80 entities.
rng = random.Random(11)
entities = [f"topic_{i}" for i in range(80)]
relations = ["influences", "contains", "contradicts", "predates"]
triples = set()
while len(triples) < 300:
    a, b = rng.sample(entities, 2)
    triples.add((a, rng.choice(relations), b))
corpus = KnowledgeGraph.from_triples(triples)

question = "how does topic_0 relate to topic_5"
seeds = ["topic_0", "topic_5"]

# 1. Cut the corpus down to the region the question lives in.
sub = extract_and_prune(corpus, seeds, hops=2)
print("working subgraph:", len(sub.entities), "nodes /", len(sub.triples), "triples")

# 2. Prize assignment + retrieval (the subgraph variant here).
ranked_nodes, ranked_edges = rank_graph_elements(sub, question)
prizes = assign_prizes(ranked_nodes, ranked_edges, k=10)
knowledge = retrieve(sub, prizes, variant="subgraph")
print("retrieved", len(knowledge.retrieved_triples()), "triples")

# 3. Render the prompt and ask the endpoint.
prompt = build_prompt(question, knowledge)
print("\n--- prompt ---")
print(prompt)

client = GenerationClient(url=url, temperature=0.7)
answer = client.generate(prompt)
print("\n--- answer ---")
print(answer.text, f"[model={answer.model_id} retries={answer.retries}]")

server.shutdown()
