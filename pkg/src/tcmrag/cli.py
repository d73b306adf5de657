"""Command-line interface.

Subcommands mirror the pipeline stages: ingest a corpus, build the graph,
inspect it, ask questions, run the evaluation formulas, and serve HTTP.
Every command is deterministic under the mock LLM profile. Exit codes: 0 on
success, 1 on a failure with a message on stderr, 2 on usage errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import demo
from .config import AppConfig, load_config, make_client, path_patterns, relation_weights
from .corpus import chunk_books, corpus_stats, load_corpus_path
from .errors import TcmragError
from .evalkit.extraction import extraction_metrics, load_triple_file
from .evalkit.ratings import inter_rater_agreement, load_ratings, mean_expert_score, response_accuracy
from .evalkit.report import consistency_report, emit_report, render_consistency_report
from .extraction.pipeline import extract_corpus
from .generation import AnswerMode, RetrievalParams, answer_payload, answer_question
from .graph.build import build_graph
from .graph.snapshot import load_snapshot, save_snapshot
from .relations import parse_relation
from .service import serve as run_service


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load_app_config(config_path: str | None) -> AppConfig:
    if config_path:
        return load_config(config_path)
    return AppConfig()


def _retrieval_params(config: AppConfig) -> RetrievalParams:
    return RetrievalParams(
        link_limit=config.retrieval.link_limit,
        max_hops=config.retrieval.max_hops,
        patterns=path_patterns(config.retrieval),
        decay=config.retrieval.decay,
        relation_weights=relation_weights(config.retrieval),
        context_budget=config.retrieval.context_budget,
        aliases=config.retrieval.aliases,
    )


@click.group()
def main() -> None:
    """Knowledge-graph construction and question answering over classical
    medical texts."""


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--chunk-size", default=1000, show_default=True)
@click.option("--chunk-overlap", default=100, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default="", help="Write chunk records here as JSONL.")
def ingest(corpus_path: str, chunk_size: int, chunk_overlap: int, out_path: str) -> None:
    """Parse a corpus and report its statistics and chunking."""
    try:
        books = load_corpus_path(corpus_path)
        chunks = chunk_books(books, chunk_size, chunk_overlap)
    except TcmragError as exc:
        _fail(str(exc))
    stats = corpus_stats(books)
    if out_path:
        lines = [
            json.dumps(
                {
                    "chunk_id": c.chunk_id,
                    "book": c.book_title,
                    "section": c.section_title,
                    "chapter": c.chapter_title,
                    "index": c.chunk_index,
                    "text": c.text,
                },
                ensure_ascii=False,
            )
            for c in chunks
        ]
        Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo(json.dumps({"corpus": stats.as_dict(), "chunks": len(chunks)}, ensure_ascii=False, indent=2))


@main.command("build-graph")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None)
@click.option("--snapshot", "snapshot_path", type=click.Path(), default=None)
@click.option("--workers", type=int, default=None, help="Extraction concurrency.")
def build_graph_cmd(config_path, corpus_path, snapshot_path, workers) -> None:
    """Run extraction over a corpus and save the graph snapshot."""
    try:
        config = _load_app_config(config_path)
        if corpus_path:
            config.corpus_path = corpus_path
        if snapshot_path:
            config.snapshot_path = snapshot_path
        if workers:
            config.extraction.max_workers = workers
        if not config.corpus_path:
            _fail("no corpus: pass --corpus or set corpus_path in the config")
        books = load_corpus_path(config.corpus_path)
        chunks = chunk_books(books, config.chunking.size, config.chunking.overlap)
        client = make_client(config.llm)
        report = extract_corpus(
            chunks,
            client,
            max_workers=config.extraction.max_workers,
            max_failure_rate=config.extraction.max_failure_rate,
        )
        store = build_graph(books, chunks, report.triples)
        save_snapshot(store, config.snapshot_path)
    except TcmragError as exc:
        _fail(str(exc))
    click.echo(f"extraction: {report.summary()}")
    if store.quarantine:
        click.echo(f"quarantined: {len(store.quarantine)}")
    stats = store.relation_stats()
    click.echo(
        f"graph: {stats.entity_total} entities, {stats.triple_total} triples, "
        f"{stats.mention_total} mentions -> {config.snapshot_path}"
    )


@main.command()
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True))
def stats(snapshot_path: str) -> None:
    """Print entity and relation counts for a snapshot."""
    try:
        store = load_snapshot(snapshot_path)
    except TcmragError as exc:
        _fail(str(exc))
    click.echo(json.dumps(store.relation_stats().as_dict(), ensure_ascii=False, indent=2))


@main.command()
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True))
@click.option("--entity", required=True, help="Entity id, or a unique entity name.")
@click.option("--depth", default=1, show_default=True)
@click.option("--relations", default="", help="Comma-separated relation filter.")
@click.option("--direction", type=click.Choice(["out", "in", "both"]), default="both", show_default=True)
def query(snapshot_path: str, entity: str, depth: int, relations: str, direction: str) -> None:
    """Print the neighborhood subgraph of an entity."""
    try:
        store = load_snapshot(snapshot_path)
        entity_id = entity
        if not store.has_entity(entity):
            named = store.entities_named(entity)
            if len(named) == 1:
                entity_id = named[0].entity_id
            elif len(named) > 1:
                _fail(
                    f"name {entity!r} is ambiguous: "
                    + ", ".join(f"{e.entity_id} ({e.category.value})" for e in named)
                )
            else:
                _fail(f"no entity with id or name {entity!r}")
        relation_filter = None
        if relations:
            relation_filter = []
            for token in relations.split(","):
                parsed = parse_relation(token.strip())
                if parsed is None:
                    _fail(f"unknown relation {token.strip()!r}")
                relation_filter.append(parsed)
        subgraph = store.neighborhood(entity_id, depth, relation_filter, direction)
    except TcmragError as exc:
        _fail(str(exc))
    payload = {
        "seed": entity_id,
        "entities": [
            {"id": e.entity_id, "name": e.name, "category": e.category.value}
            for e in subgraph.entities
        ],
        "triples": [
            {
                "id": t.triple_id,
                "subject": store.entity(t.subject_id).name,
                "relation": t.relation.value,
                "object": store.entity(t.object_id).name,
                "provenance": sorted(t.provenance),
            }
            for t in subgraph.triples
        ],
    }
    click.echo(json.dumps(payload, ensure_ascii=False, indent=2))


@main.command()
@click.option("--snapshot", "snapshot_path", required=True, type=click.Path(exists=True))
@click.option("--question", required=True)
@click.option(
    "--mode",
    type=click.Choice([m.value for m in AnswerMode]),
    default=AnswerMode.DIAGNOSTIC_QA.value,
    show_default=True,
)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def qa(snapshot_path: str, question: str, mode: str, config_path) -> None:
    """Answer one question against a snapshot."""
    try:
        config = _load_app_config(config_path)
        store = load_snapshot(snapshot_path)
        client = make_client(config.llm)
        answer = answer_question(
            question, store, client, _retrieval_params(config), AnswerMode(mode)
        )
    except TcmragError as exc:
        _fail(str(exc))
    click.echo(json.dumps(answer_payload(answer), ensure_ascii=False, indent=2))


@main.command("eval-extraction")
@click.option("--predicted", "predicted_path", required=True, type=click.Path(exists=True))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
def eval_extraction(predicted_path: str, gold_path: str) -> None:
    """Score predicted triples against gold annotations."""
    try:
        predicted = load_triple_file(predicted_path)
        gold = load_triple_file(gold_path)
    except TcmragError as exc:
        _fail(str(exc))
    m = extraction_metrics(predicted, gold)
    click.echo(f"P={m.precision:.4f} R={m.recall:.4f} F1={m.f1:.4f} Acc={m.accuracy:.4f}")
    click.echo(f"tp={m.tp} fp={m.fp} fn={m.fn}" + (" (degenerate)" if m.degenerate else ""))


@main.command("eval-ratings")
@click.option("--ratings", "ratings_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", default=3, show_default=True)
@click.option("--per-item", is_flag=True, help="Accuracy per item (majority) instead of per rating.")
def eval_ratings(ratings_path: str, threshold: int, per_item: bool) -> None:
    """Compute MES, response accuracy and inter-rater agreement."""
    try:
        matrix = load_ratings(ratings_path)
        mes = mean_expert_score(matrix)
        acc = response_accuracy(matrix, threshold, per_item=per_item)
        ira = inter_rater_agreement(matrix, threshold)
    except TcmragError as exc:
        _fail(str(exc))
    click.echo(f"MES={mes:.4f} Acc={acc:.4f} IRA={ira:.4f}")
    click.echo(f"items={matrix.n_items} raters={matrix.n_raters} threshold={threshold}")


@main.command("eval-report")
@click.option("--json", "json_path", type=click.Path(), default="", help="Also write the machine-readable report here.")
def eval_report(json_path: str) -> None:
    """Print the reference-target consistency report."""
    report = consistency_report()
    click.echo(render_consistency_report(report))
    if json_path:
        emit_report(json_path, report)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path: str) -> None:
    """Serve the HTTP API (and the console, if a static dir is configured)."""
    try:
        config = load_config(config_path)
        run_service(config)
    except TcmragError as exc:
        _fail(str(exc))


@main.command("demo-workspace")
@click.option("--dir", "directory", required=True, type=click.Path())
def demo_workspace(directory: str) -> None:
    """Write the bundled demo corpus, mock responses and config to a directory."""
    config_path = demo.write_workspace(directory)
    click.echo(f"demo workspace ready: {config_path}")
    click.echo("next: tcmrag build-graph --config " + str(config_path))
    click.echo(f'then: tcmrag qa --snapshot {Path(directory) / "graph.snapshot"} '
               f'--question "{demo.DEMO_QUESTION}" --config {config_path}')


if __name__ == "__main__":
    main()
