"""HTTP service exposing the graph and the question-answering pipeline.

All endpoints live under the versioned /v1 prefix and speak JSON. The store
is treated as read-only for the lifetime of the process; LLM calls are the
only stateful dependency and are bounded by a global in-flight limit. With
the default mock profile the whole service is deterministic and offline.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Literal

import uvicorn
from fastapi import APIRouter, FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from .config import AppConfig, make_client, path_patterns, relation_weights
from .corpus import chunk_books, load_corpus_path
from .errors import (
    ConfigError,
    EntityNameError,
    GenerationError,
    RatingsError,
    UnknownEntityError,
)
from .evalkit.extraction import canonical_triple, extraction_metrics
from .evalkit.ratings import RatingMatrix, inter_rater_agreement, mean_expert_score, response_accuracy
from .extraction.client import LlmClient
from .extraction.pipeline import extract_corpus
from .generation import AnswerMode, RetrievalParams, answer_payload, answer_question
from .graph.build import build_graph
from .graph.snapshot import load_snapshot, save_snapshot
from .graph.store import GraphStore
from .relations import parse_relation


class _BoundedClient:
    """Serializes access to the underlying client beyond a global limit."""

    def __init__(self, inner: LlmClient, limit: int) -> None:
        self._inner = inner
        self._slots = threading.BoundedSemaphore(limit)

    def complete(self, prompt, params):
        with self._slots:
            return self._inner.complete(prompt, params)


class TripleIn(BaseModel):
    model_config = ConfigDict(extra="forbid")
    subject: str = Field(min_length=1)
    predicate: str = Field(min_length=1)
    object: str = Field(min_length=1)


class QaRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    question: str = Field(min_length=1)
    mode: Literal["diagnostic_qa", "ingredient_lookup"] = "diagnostic_qa"


class IngredientSearchRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    query: str = Field(min_length=1)


class EvalExtractionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    predicted: list[TripleIn]
    gold: list[TripleIn]


class RatingIn(BaseModel):
    model_config = ConfigDict(extra="forbid")
    item: str = Field(min_length=1)
    rater: str = Field(min_length=1)
    score: int


class EvalRatingsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    records: list[RatingIn]
    threshold: int = 3
    per_item: bool = False


def _entity_dict(entity) -> dict:
    return {"id": entity.entity_id, "name": entity.name, "category": entity.category.value}


def create_app(
    store: GraphStore,
    client: LlmClient,
    *,
    retrieval: RetrievalParams | None = None,
    static_dir: str = "",
    max_inflight_llm: int = 4,
) -> FastAPI:
    app = FastAPI(title="tcmrag", docs_url=None, redoc_url=None)
    bounded = _BoundedClient(client, max_inflight_llm)
    params = retrieval or RetrievalParams()
    app.state.store = store
    app.state.client = client

    v1 = APIRouter(prefix="/v1")

    @v1.get("/health")
    def health() -> dict:
        return {"status": "ok", "stats": store.relation_stats().as_dict()}

    @v1.get("/graph/stats")
    def graph_stats() -> dict:
        return store.relation_stats().as_dict()

    @v1.get("/graph/neighborhood")
    def graph_neighborhood(
        entity: str,
        depth: int = Query(default=1, ge=0, le=6),
        relations: str = "",
        direction: Literal["out", "in", "both"] = "both",
    ) -> dict:
        relation_filter = None
        if relations:
            relation_filter = []
            for token in relations.split(","):
                parsed = parse_relation(token.strip())
                if parsed is None:
                    raise HTTPException(status_code=400, detail=f"unknown relation {token.strip()!r}")
                relation_filter.append(parsed)
        try:
            subgraph = store.neighborhood(entity, depth, relation_filter, direction)
        except UnknownEntityError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return {
            "seed": entity,
            "entities": [_entity_dict(e) for e in subgraph.entities],
            "triples": [
                {
                    "id": t.triple_id,
                    "subject": t.subject_id,
                    "relation": t.relation.value,
                    "object": t.object_id,
                    "provenance": sorted(t.provenance),
                }
                for t in subgraph.triples
            ],
        }

    def _answer(question: str, mode: AnswerMode) -> dict:
        try:
            answer = answer_question(question, store, bounded, params, mode)
        except GenerationError as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return answer_payload(answer)

    @v1.post("/qa")
    def qa(request: QaRequest) -> dict:
        return _answer(request.question, AnswerMode(request.mode))

    @v1.post("/search/ingredient")
    def search_ingredient(request: IngredientSearchRequest) -> dict:
        return _answer(request.query, AnswerMode.INGREDIENT_LOOKUP)

    @v1.post("/eval/extraction")
    def eval_extraction(request: EvalExtractionRequest) -> dict:
        try:
            predicted = {canonical_triple(t.subject, t.predicate, t.object) for t in request.predicted}
            gold = {canonical_triple(t.subject, t.predicate, t.object) for t in request.gold}
        except EntityNameError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return extraction_metrics(predicted, gold).as_dict()

    @v1.post("/eval/ratings")
    def eval_ratings(request: EvalRatingsRequest) -> dict:
        try:
            matrix = RatingMatrix.from_records(
                [(r.item, r.rater, r.score) for r in request.records]
            )
            return {
                "n_items": matrix.n_items,
                "n_raters": matrix.n_raters,
                "mean_expert_score": mean_expert_score(matrix),
                "response_accuracy": response_accuracy(
                    matrix, request.threshold, per_item=request.per_item
                ),
                "inter_rater_agreement": inter_rater_agreement(matrix, request.threshold),
            }
        except RatingsError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    app.include_router(v1)
    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")
    return app


def build_or_load_store(config: AppConfig) -> GraphStore:
    """Load the configured snapshot, or build it from the corpus when absent."""
    snapshot = Path(config.snapshot_path)
    if snapshot.exists():
        return load_snapshot(snapshot)
    if not config.corpus_path:
        raise ConfigError(
            f"snapshot {snapshot} does not exist and no corpus_path is configured to build it"
        )
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
    save_snapshot(store, snapshot)
    return store


def app_from_config(config: AppConfig) -> FastAPI:
    store = build_or_load_store(config)
    client = make_client(config.llm)
    params = RetrievalParams(
        link_limit=config.retrieval.link_limit,
        max_hops=config.retrieval.max_hops,
        patterns=path_patterns(config.retrieval),
        decay=config.retrieval.decay,
        relation_weights=relation_weights(config.retrieval),
        context_budget=config.retrieval.context_budget,
        aliases=config.retrieval.aliases,
    )
    return create_app(
        store,
        client,
        retrieval=params,
        static_dir=config.service.static_dir,
        max_inflight_llm=config.service.max_inflight_llm,
    )


def serve(config: AppConfig) -> None:
    """Run the service until interrupted."""
    app = app_from_config(config)
    uvicorn.run(app, host=config.service.host, port=config.service.port, log_level="info")
