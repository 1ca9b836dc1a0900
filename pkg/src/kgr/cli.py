"""Command-line interface.

Subcommands: extract | retrieve | perturb | measure | sweep | generate |
stats.  Every option can come from a YAML config file (``--config``);
explicit flags win over the file, the file wins over built-in defaults.
A config file may hold flat keys and/or per-command sections::

    graph: data/graph.tsv
    sweep:
      methods: [edge_delete, edge_rewire]
      levels: [0.0, 0.5, 1.0]

Outputs are written atomically (temp file + rename) and are byte-stable
across reruns with equal inputs; wall-clock data goes to separate
metadata files.  Exit codes: 0 success, 2 configuration error, 3 sweep
finished with failed cells, 4 transport failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import yaml

from .graph import EntityNotFoundError, KnowledgeGraph, graph_stats
from .ingest import (
    FORMAT_TSV,
    FORMATS,
    ParseError,
    read_graph,
    serialize,
)
from .metrics import compare, fit_baseline_scorer
from .perturb import (
    METHODS,
    PerturbationSpec,
    REPLACE_LEAST_PLAUSIBLE,
    REPLACE_MOST_PLAUSIBLE,
    edit_log_to_jsonl,
    normalize_method,
    perturb,
)
from .ppr import PprConfig, extract_and_prune
from .relevance import (
    HashedBagEmbedder,
    ServiceEmbedder,
    assign_prizes,
    rank_graph_elements,
    EMBED_TOKEN_ENV,
    EMBED_URL_ENV,
)
from .retrieval import (
    VARIANT_TRIPLETS,
    VARIANTS,
    retrieve,
    retrieved_from_json_dict,
)
from .textgen import (
    GEN_TOKEN_ENV,
    GEN_URL_ENV,
    GenerationClient,
    GenerationError,
    PromptTemplate,
    build_prompt,
)
from .transport import TransportError

logger = logging.getLogger(__name__)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _dump_jsonl_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        _atomic_write(out_path, text)
    else:
        sys.stdout.write(text)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    if not os.path.isfile(path):
        raise CliError(2, f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            loaded = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise CliError(2, f"config file is not valid YAML: {exc}")
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise CliError(2, "config file must hold a mapping at the top level")
    return loaded


def _as_list(value, item_cast) -> list:
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = [value]
    return [item_cast(p) for p in parts]


class Options:
    """Option resolution: explicit flag > config file > default."""

    def __init__(self, args: argparse.Namespace, cfg: dict, command: str):
        flat = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
        section = cfg.get(command, {})
        if not isinstance(section, dict):
            raise CliError(2, f"config section {command!r} must be a mapping")
        self._cfg = {**flat, **section}
        self._args = args

    def get(self, key: str, default=None, cast=None, required: bool = False):
        value = getattr(self._args, key, None)
        if value is None:
            value = self._cfg.get(key)
        if value is None:
            value = default
        if required and value is None:
            raise CliError(2, f"missing required option --{key.replace('_', '-')}")
        if cast is not None and value is not None:
            try:
                value = cast(value)
            except (TypeError, ValueError) as exc:
                raise CliError(2, f"bad value for {key}: {exc}")
        return value


def _require_file(path: str, what: str) -> str:
    if not os.path.isfile(path):
        raise CliError(2, f"{what} not found: {path}")
    return path


def _read_graph_checked(path: str, fmt: str) -> KnowledgeGraph:
    _require_file(path, "graph file")
    try:
        return read_graph(path, fmt)
    except ParseError as exc:
        raise CliError(2, f"{path}: {exc}")


def _load_queries(path: str) -> list[dict]:
    _require_file(path, "queries file")
    queries: list[dict] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CliError(2, f"{path}:{lineno}: not valid JSON: {exc}")
            if not isinstance(rec, dict):
                raise CliError(2, f"{path}:{lineno}: each query must be a JSON object")
            qid = rec.get("id")
            question = rec.get("question")
            if not isinstance(qid, str) or not qid:
                raise CliError(2, f"{path}:{lineno}: missing string field 'id'")
            if qid in seen_ids:
                raise CliError(2, f"{path}:{lineno}: duplicate query id {qid!r}")
            seen_ids.add(qid)
            if not isinstance(question, str) or not question.strip():
                raise CliError(2, f"{path}:{lineno}: missing string field 'question'")
            seeds = rec.get("seeds", [])
            if not isinstance(seeds, list) or any(
                not isinstance(s, str) or not s for s in seeds
            ):
                raise CliError(2, f"{path}:{lineno}: 'seeds' must be a list of ids")
            queries.append({"id": qid, "question": question, "seeds": seeds})
    if not queries:
        raise CliError(2, f"{path}: no queries found")
    return queries


def _embedder(opts: Options):
    url = opts.get("embed_url", default=os.environ.get(EMBED_URL_ENV) or None)
    if url:
        token = opts.get("embed_token", default=os.environ.get(EMBED_TOKEN_ENV) or None)
        return ServiceEmbedder(url=url, token=token)
    return HashedBagEmbedder()


def _ppr_config(opts: Options) -> PprConfig:
    try:
        return PprConfig(
            alpha=opts.get("alpha", default=0.85, cast=float),
            tol=opts.get("tol", default=1e-6, cast=float),
            max_iter=opts.get("max_iter", default=100, cast=int),
            prune_threshold=opts.get("prune_threshold", default=1e-5, cast=float),
        )
    except ValueError as exc:
        raise CliError(2, str(exc))


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_stats(args: argparse.Namespace, cfg: dict) -> int:
    opts = Options(args, cfg, "stats")
    fmt = opts.get("format", default=FORMAT_TSV)
    g = _read_graph_checked(opts.get("graph", required=True), fmt)
    _emit(_dump_json(graph_stats(g).to_dict()), opts.get("out"))
    return 0


def _cmd_extract(args: argparse.Namespace, cfg: dict) -> int:
    opts = Options(args, cfg, "extract")
    fmt = opts.get("format", default=FORMAT_TSV)
    hops = opts.get("hops", default=2, cast=int)
    if hops < 0:
        raise CliError(2, "hops must be >= 0")
    undirected = bool(opts.get("undirected", default=False))
    config = _ppr_config(opts)
    g = _read_graph_checked(opts.get("graph", required=True), fmt)

    seeds_opt = opts.get("seeds")
    queries_path = opts.get("queries")
    if (seeds_opt is None) == (queries_path is None):
        raise CliError(2, "provide exactly one of --seeds or --queries")

    def run(seeds: list[str]) -> KnowledgeGraph:
        try:
            return extract_and_prune(g, seeds, hops, config, undirected)
        except EntityNotFoundError as exc:
            raise CliError(2, f"seed entity not in graph: {exc.args[0]}")
        except ValueError as exc:
            raise CliError(2, str(exc))

    if seeds_opt is not None:
        seeds = _as_list(seeds_opt, str)
        if not seeds:
            raise CliError(2, "at least one seed is required")
        _emit(serialize(run(seeds)), opts.get("out"))
        return 0

    queries = _load_queries(queries_path)
    out_dir = opts.get("out", required=True)
    results = []
    for q in queries:
        if not q["seeds"]:
            raise CliError(2, f"query {q['id']!r} has no seeds")
        results.append((q["id"], run(q["seeds"])))
    for qid, sub in results:
        _atomic_write(os.path.join(out_dir, f"{qid}.tsv"), serialize(sub))
    return 0


def _retrieval_params(opts: Options) -> dict:
    k = opts.get("k", default=15, cast=int)
    return {
        "k": k,
        "edge_cost": opts.get("edge_cost", default=1.0, cast=float),
        "variant": opts.get("variant", default=VARIANT_TRIPLETS),
        "n": opts.get("n", cast=int),
        "start_count": opts.get("start_count", default=5, cast=int),
        "max_len": opts.get("max_len", default=4, cast=int),
        "result_count": opts.get("result_count", cast=int),
        "directed_only": bool(opts.get("directed_only", default=False)),
    }


def _retrieve_one(g: KnowledgeGraph, question: str, provider, params: dict):
    ranked_nodes, ranked_edges = rank_graph_elements(g, question, provider)
    prizes = assign_prizes(
        ranked_nodes, ranked_edges, k=params["k"], edge_cost=params["edge_cost"]
    )
    return retrieve(
        g,
        prizes,
        variant=params["variant"],
        n=params["n"],
        start_count=params["start_count"],
        max_len=params["max_len"],
        result_count=params["result_count"],
        directed_only=params["directed_only"],
    )


def _cmd_retrieve(args: argparse.Namespace, cfg: dict) -> int:
    opts = Options(args, cfg, "retrieve")
    fmt = opts.get("format", default=FORMAT_TSV)
    params = _retrieval_params(opts)
    if params["variant"] not in VARIANTS:
        raise CliError(2, f"variant must be one of {', '.join(VARIANTS)}")
    queries = _load_queries(opts.get("queries", required=True))
    graph_path = opts.get("graph")
    graph_dir = opts.get("graph_dir")
    if (graph_path is None) == (graph_dir is None):
        raise CliError(2, "provide exactly one of --graph or --graph-dir")
    provider = _embedder(opts)

    shared = _read_graph_checked(graph_path, fmt) if graph_path else None
    lines: list[str] = []
    for q in queries:
        if shared is not None:
            g = shared
        else:
            g = _read_graph_checked(os.path.join(graph_dir, f"{q['id']}.tsv"), fmt)
        try:
            result = _retrieve_one(g, q["question"], provider, params)
        except ValueError as exc:
            raise CliError(2, str(exc))
        record = {"id": q["id"], "question": q["question"], **result.to_json_dict()}
        lines.append(_dump_jsonl_line(record))
    _emit("".join(lines), opts.get("out"))
    return 0


def _cmd_perturb(args: argparse.Namespace, cfg: dict) -> int:
    opts = Options(args, cfg, "perturb")
    fmt = opts.get("format", default=FORMAT_TSV)
    g = _read_graph_checked(opts.get("graph", required=True), fmt)
    try:
        spec = PerturbationSpec(
            method=opts.get("method", required=True),
            level=opts.get("level", required=True, cast=float),
            seed=opts.get("seed", default=0, cast=int),
        )
        result = perturb(g, spec, replace_mode=opts.get(
            "replace_mode", default=REPLACE_LEAST_PLAUSIBLE
        ))
    except ValueError as exc:
        raise CliError(2, str(exc))
    _emit(serialize(result.graph), opts.get("out"))
    log_path = opts.get("edit_log")
    if log_path:
        header = _dump_jsonl_line(
            {
                "record_type": "header",
                "method": spec.method,
                "level": spec.level,
                "seed": spec.seed,
            }
        )
        _atomic_write(log_path, header + edit_log_to_jsonl(result.edit_log))
    return 0


def _aligned_perturbed(g: KnowledgeGraph, gp: KnowledgeGraph) -> KnowledgeGraph:
    """Re-attach isolated entities lost by TSV round-tripping."""
    if gp.entities == g.entities:
        return gp
    if not gp.entities <= g.entities:
        extra = sorted(gp.entities - g.entities)[:3]
        raise CliError(
            2, f"perturbed graph has entities unknown to the original, e.g. {extra}"
        )
    return KnowledgeGraph.from_triples(gp.triples, extra_entities=g.entities)


def _cmd_measure(args: argparse.Namespace, cfg: dict) -> int:
    opts = Options(args, cfg, "measure")
    fmt = opts.get("format", default=FORMAT_TSV)
    g = _read_graph_checked(opts.get("graph", required=True), fmt)
    if not g.triples:
        raise CliError(2, "original graph has no triples; nothing to score against")
    method = opts.get("method")
    level = opts.get("level", cast=float)
    seed = opts.get("seed", cast=int)
    perturbed_path = opts.get("perturbed")
    try:
        if perturbed_path:
            gp = _aligned_perturbed(g, _read_graph_checked(perturbed_path, fmt))
        else:
            if method is None or level is None:
                raise CliError(
                    2, "without --perturbed, both --method and --level are required"
                )
            spec = PerturbationSpec(method=method, level=level, seed=seed or 0)
            gp = perturb(g, spec).graph
            method, level, seed = spec.method, spec.level, spec.seed
        report = compare(g, gp)
    except CliError:
        raise
    except ValueError as exc:
        raise CliError(2, str(exc))
    normalized = normalize_method(method) if method else None
    _emit(
        _dump_json(report.to_json_dict(method=normalized, level=level, seed=seed)),
        opts.get("out"),
    )
    return 0


def _derive_seeds(root_seed: int, count: int) -> list[int]:
    """Split one root seed into ``count`` independent cell seeds."""
    state = np.random.SeedSequence(root_seed).generate_state(count, dtype=np.uint32)
    return [int(x) for x in state]


def _jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    return len(a & b) / len(union)


def _cmd_sweep(args: argparse.Namespace, cfg: dict) -> int:
    opts = Options(args, cfg, "sweep")
    fmt = opts.get("format", default=FORMAT_TSV)
    g = _read_graph_checked(opts.get("graph", required=True), fmt)
    if not g.triples:
        raise CliError(2, "graph has no triples; nothing to perturb")
    queries = _load_queries(opts.get("queries", required=True))
    out_dir = opts.get("out", required=True)
    params = _retrieval_params(opts)
    if params["variant"] not in VARIANTS:
        raise CliError(2, f"variant must be one of {', '.join(VARIANTS)}")
    try:
        methods = [
            normalize_method(m)
            for m in opts.get("methods", default=",".join(METHODS), cast=lambda v: _as_list(v, str))
        ]
        levels = opts.get(
            "levels", default=[0.0, 0.25, 0.5, 0.75, 1.0], cast=lambda v: _as_list(v, float)
        )
    except ValueError as exc:
        raise CliError(2, str(exc))
    if not methods or not levels:
        raise CliError(2, "methods and levels must be non-empty")
    for lvl in levels:
        if not 0.0 <= lvl <= 1.0:
            raise CliError(2, f"level {lvl} outside [0, 1]")
    num_seeds = opts.get("num_seeds", default=5, cast=int)
    if num_seeds < 1:
        raise CliError(2, "num_seeds must be >= 1")
    root_seed = opts.get("seed", default=0, cast=int)
    workers = opts.get("workers", default=os.cpu_count() or 1, cast=int)
    if workers < 1:
        raise CliError(2, "workers must be >= 1")
    provider = _embedder(opts)
    replace_mode = opts.get("replace_mode", default=REPLACE_LEAST_PLAUSIBLE)

    started = time.perf_counter()
    scorer = fit_baseline_scorer(g)
    baseline: dict[str, set] = {}
    for q in queries:
        baseline[q["id"]] = _retrieve_one(
            g, q["question"], provider, params
        ).retrieved_triples()

    cell_seeds = _derive_seeds(root_seed, num_seeds)
    cells = [
        (mi, li, method, level, seed)
        for mi, method in enumerate(methods)
        for li, level in enumerate(levels)
        for seed in cell_seeds
    ]

    def run_cell(cell):
        _, _, method, level, seed = cell
        cell_start = time.perf_counter()
        try:
            spec = PerturbationSpec(method=method, level=level, seed=seed)
            pg = perturb(g, spec, scorer=scorer, replace_mode=replace_mode)
            report = compare(g, pg.graph, scorer)
            per_query = []
            for q in queries:
                retrieved = _retrieve_one(
                    pg.graph, q["question"], provider, params
                ).retrieved_triples()
                per_query.append(
                    {"id": q["id"], "overlap": _jaccard(baseline[q["id"]], retrieved)}
                )
            overlap = sum(p["overlap"] for p in per_query) / len(per_query)
            record = {
                "method": method,
                "level": level,
                "seed": seed,
                "ats": report.ats,
                "sc2d": report.sc2d,
                "sd2": report.sd2,
                "retrieval_overlap": overlap,
                "per_query": per_query,
            }
        except Exception as exc:  # cell failure must not sink the sweep
            record = {"method": method, "level": level, "seed": seed, "error": str(exc)}
        return cell, record, time.perf_counter() - cell_start


    if workers == 1:
        outcomes = [run_cell(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_cell, cells))
    outcomes.sort(key=lambda item: (item[0][0], item[0][1], item[0][4]))

    header = {
        "record_type": "header",
        "root_seed": root_seed,
        "cell_seeds": cell_seeds,
        "methods": methods,
        "levels": levels,
        "num_seeds": num_seeds,
        "variant": params["variant"],
        "prize_k": params["k"],
        "edge_cost": params["edge_cost"],
        "query_count": len(queries),
    }
    lines = [_dump_jsonl_line(header)]
    lines.extend(_dump_jsonl_line(rec) for _, rec, _ in outcomes)

    curve_rows = []
    for mi, method in enumerate(methods):
        for li, level in enumerate(levels):
            good = [
                rec
                for cell, rec, _ in outcomes
                if cell[0] == mi and cell[1] == li and "error" not in rec
            ]
            if not good:
                continue
            curve_rows.append(
                {
                    "method": method,
                    "level": level,
                    "mean_ats": sum(r["ats"] for r in good) / len(good),
                    "mean_sc2d": sum(r["sc2d"] for r in good) / len(good),
                    "mean_sd2": sum(r["sd2"] for r in good) / len(good),
                    "mean_retrieval_overlap": sum(
                        r["retrieval_overlap"] for r in good
                    )
                    / len(good),
                    "seeds_used": len(good),
                }
            )
    csv_lines = ["method,level,mean_ats,mean_sc2d,mean_sd2,mean_retrieval_overlap,seeds_used"]
    for row in curve_rows:
        csv_lines.append(
            f"{row['method']},{row['level']!r},{row['mean_ats']!r},"
            f"{row['mean_sc2d']!r},{row['mean_sd2']!r},"
            f"{row['mean_retrieval_overlap']!r},{row['seeds_used']}"
        )

    failures = sum(1 for _, rec, _ in outcomes if "error" in rec)
    meta = {
        "started_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "wall_time_s": time.perf_counter() - started,
        "cells": len(cells),
        "failed_cells": failures,
        "workers": workers,
        "cell_seconds": [dur for _, _, dur in outcomes],
    }

    _atomic_write(os.path.join(out_dir, "records.jsonl"), "".join(lines))
    _atomic_write(os.path.join(out_dir, "curves.csv"), "\n".join(csv_lines) + "\n")
    _atomic_write(os.path.join(out_dir, "meta.json"), _dump_json(meta))
    if failures:
        logger.warning("%d of %d sweep cells failed", failures, len(cells))
        return 3
    return 0


def _cmd_generate(args: argparse.Namespace, cfg: dict) -> int:
    opts = Options(args, cfg, "generate")
    retrieved_path = _require_file(opts.get("retrieved", required=True), "retrieved file")
    out_path = opts.get("out")
    url = opts.get("gen_url", default=os.environ.get(GEN_URL_ENV) or None)
    if not url:
        raise CliError(2, f"generation endpoint required (--gen-url or {GEN_URL_ENV})")
    token = opts.get("gen_token", default=os.environ.get(GEN_TOKEN_ENV) or None)

    system_path = opts.get("template_system")
    body_path = opts.get("template_body")
    if (system_path is None) != (body_path is None):
        raise CliError(2, "--template-system and --template-body go together")
    try:
        if system_path:
            _require_file(system_path, "template system file")
            _require_file(body_path, "template body file")
            template = PromptTemplate.from_files(system_path, body_path)
        else:
            template = PromptTemplate.default()
    except ValueError as exc:
        raise CliError(2, str(exc))

    records = []
    with open(retrieved_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CliError(2, f"{retrieved_path}:{lineno}: not valid JSON: {exc}")
            if rec.get("record_type") == "header":
                continue
            try:
                knowledge = retrieved_from_json_dict(rec)
            except (KeyError, ValueError, TypeError) as exc:
                raise CliError(2, f"{retrieved_path}:{lineno}: bad record: {exc}")
            records.append(
                (rec.get("id", f"line{lineno}"), rec.get("question", ""), knowledge)
            )
    if not records:
        raise CliError(2, f"{retrieved_path}: no retrieval records found")

    client = GenerationClient(
        url=url,
        token=token,
        temperature=opts.get("temperature", default=0.7, cast=float),
        top_p=opts.get("top_p", default=1.0, cast=float),
        timeout=opts.get("timeout", default=60.0, cast=float),
        max_attempts=opts.get("max_attempts", default=3, cast=int),
        backoff=opts.get("backoff", default=0.5, cast=float),
    )
    prompts = [
        (qid, question, build_prompt(question, knowledge, template))
        for qid, question, knowledge in records
    ]
    pool_size = min(client.max_in_flight, len(prompts))
    with ThreadPoolExecutor(max_workers=pool_size) as pool:
        answers = list(pool.map(lambda item: client.generate(item[2]), prompts))

    lines = []
    latencies = {}
    for (qid, question, prompt), answer in zip(prompts, answers):
        lines.append(
            _dump_jsonl_line(
                {
                    "id": qid,
                    "question": question,
                    "prompt": prompt,
                    "answer": answer.text,
                    "model_id": answer.model_id,
                    "retries": answer.retries,
                }
            )
        )
        latencies[qid] = answer.latency_s
    _emit("".join(lines), out_path)
    if out_path:
        meta = {
            "endpoint": url,
            "generated_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "latencies_s": latencies,
        }
        _atomic_write(f"{out_path}.meta.json", _dump_json(meta))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="YAML config file; flags override it")
    sub.add_argument("--seed", type=int, help="random seed (root seed for sweep)")
    sub.add_argument("--out", help="output file (or directory where noted)")
    sub.add_argument("--workers", type=int, help="worker pool width for sweep")
    sub.add_argument(
        "--format", choices=list(FORMATS), help="input graph format (default tsv)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgr",
        description="Knowledge-graph extraction, retrieval, perturbation, and metrics",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    subs = parser.add_subparsers(dest="command")

    p = subs.add_parser("stats", help="whole-graph statistics as JSON")
    _common_flags(p)
    p.add_argument("--graph", help="input graph file")

    p = subs.add_parser("extract", help="K-hop extraction plus PPR pruning")
    _common_flags(p)
    p.add_argument("--graph", help="input graph file")
    p.add_argument("--seeds", help="comma-separated seed entity ids")
    p.add_argument("--queries", help="queries JSONL with per-query seeds")
    p.add_argument("--hops", type=int, help="hop budget (default 2)")
    p.add_argument("--alpha", type=float, help="restart weight (default 0.85)")
    p.add_argument("--tol", type=float, help="convergence tolerance (default 1e-6)")
    p.add_argument("--max-iter", type=int, help="iteration cap (default 100)")
    p.add_argument(
        "--prune-threshold", type=float, help="score cutoff (default 1e-5)"
    )
    p.add_argument(
        "--undirected", action="store_const", const=True, help="walk ignores direction"
    )

    p = subs.add_parser("retrieve", help="prize-based knowledge retrieval")
    _common_flags(p)
    p.add_argument("--graph", help="shared input graph file")
    p.add_argument("--graph-dir", help="directory of per-query <id>.tsv graphs")
    p.add_argument("--queries", help="queries JSONL")
    p.add_argument("--variant", help="triplets | paths | subgraph")
    p.add_argument("--k", type=int, help="prize depth (default 15)")
    p.add_argument("--edge-cost", type=float, help="uniform edge cost (default 1.0)")
    p.add_argument("--n", type=int, help="triplet count (default k)")
    p.add_argument("--start-count", type=int, help="path start nodes (default 5)")
    p.add_argument("--max-len", type=int, help="path length cap in edges (default 4)")
    p.add_argument("--result-count", type=int, help="paths returned (default k)")
    p.add_argument(
        "--directed-only",
        action="store_const",
        const=True,
        help="paths follow edge direction only",
    )
    p.add_argument("--embed-url", help=f"embedding endpoint (default ${EMBED_URL_ENV})")
    p.add_argument("--embed-token", help=f"bearer token (default ${EMBED_TOKEN_ENV})")

    p = subs.add_parser("perturb", help="apply one perturbation method")
    _common_flags(p)
    p.add_argument("--graph", help="input graph file")
    p.add_argument("--method", help=" | ".join(METHODS))
    p.add_argument("--level", type=float, help="perturbation level in [0, 1]")
    p.add_argument("--edit-log", help="write the edit log JSONL here")
    p.add_argument(
        "--replace-mode",
        choices=[REPLACE_LEAST_PLAUSIBLE, REPLACE_MOST_PLAUSIBLE],
        help="relation_replace candidate order",
    )

    p = subs.add_parser("measure", help="similarity metrics original vs perturbed")
    _common_flags(p)
    p.add_argument("--graph", help="original graph file")
    p.add_argument("--perturbed", help="perturbed graph file (else perturb inline)")
    p.add_argument("--method", help="perturbation method (inline or metadata)")
    p.add_argument("--level", type=float, help="perturbation level")

    p = subs.add_parser("sweep", help="method x level x seed perturbation grid")
    _common_flags(p)
    p.add_argument("--graph", help="input graph file")
    p.add_argument("--queries", help="queries JSONL")
    p.add_argument("--methods", help="comma-separated methods (default all four)")
    p.add_argument("--levels", help="comma-separated levels (default 0,0.25,...,1)")
    p.add_argument("--num-seeds", type=int, help="seeds per cell (default 5)")
    p.add_argument("--variant", help="retrieval variant for overlap (default triplets)")
    p.add_argument("--k", type=int, help="prize depth (default 15)")
    p.add_argument("--edge-cost", type=float, help="uniform edge cost (default 1.0)")
    p.add_argument("--start-count", type=int, help=argparse.SUPPRESS)
    p.add_argument("--max-len", type=int, help=argparse.SUPPRESS)
    p.add_argument("--result-count", type=int, help=argparse.SUPPRESS)
    p.add_argument("--n", type=int, help=argparse.SUPPRESS)
    p.add_argument("--directed-only", action="store_const", const=True, help=argparse.SUPPRESS)
    p.add_argument("--replace-mode", choices=[REPLACE_LEAST_PLAUSIBLE, REPLACE_MOST_PLAUSIBLE])
    p.add_argument("--embed-url", help=f"embedding endpoint (default ${EMBED_URL_ENV})")
    p.add_argument("--embed-token", help=f"bearer token (default ${EMBED_TOKEN_ENV})")

    p = subs.add_parser("generate", help="prompt building and answer generation")
    _common_flags(p)
    p.add_argument("--retrieved", help="JSONL produced by `kgr retrieve`")
    p.add_argument("--gen-url", help=f"generation endpoint (default ${GEN_URL_ENV})")
    p.add_argument("--gen-token", help=f"bearer token (default ${GEN_TOKEN_ENV})")
    p.add_argument("--template-system", help="system text file (default built-in)")
    p.add_argument("--template-body", help="body pattern file (default built-in)")
    p.add_argument("--temperature", type=float, help="sampling temperature (default 0.7)")
    p.add_argument("--top-p", type=float, help="nucleus mass (default 1.0)")
    p.add_argument("--timeout", type=float, help="request timeout seconds (default 60)")
    p.add_argument("--max-attempts", type=int, help="attempts per request (default 3)")
    p.add_argument("--backoff", type=float, help="base backoff seconds (default 0.5)")

    return parser


_HANDLERS = {
    "stats": _cmd_stats,
    "extract": _cmd_extract,
    "retrieve": _cmd_retrieve,
    "perturb": _cmd_perturb,
    "measure": _cmd_measure,
    "sweep": _cmd_sweep,
    "generate": _cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    if not args.command:
        parser.print_help()
        return 2
    try:
        cfg = _load_config(args.config)
        return _HANDLERS[args.command](args, cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (TransportError, GenerationError) as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 4
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EntityNotFoundError, KeyError) as exc:
        print(f"error: not found: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
