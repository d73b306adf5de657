"""Corpus-level extraction: prompt every chunk, collect provenanced triples.

Chunks are processed concurrently but the report is canonical: outcomes are
sorted by chunk id and triples keep their in-array position, so two runs over
the same corpus with the same client produce identical reports regardless of
worker scheduling.

A chunk whose LLM call fails is recorded, not fatal, unless the failure rate
over the whole run crosses ``max_failure_rate``; then the run aborts with the
partial report attached for inspection.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from ..corpus import Chunk
from ..errors import ExtractionAbortedError, LlmError
from ..relations import CONTENT_RELATIONS, RelationType
from .client import DecodingParams, LlmClient
from .parsing import ResolvedTriple, SkippedRecord, parse_triple_response
from .prompts import build_extraction_prompt

DEFAULT_MAX_WORKERS = 4
DEFAULT_MAX_FAILURE_RATE = 0.2

# The LLM is only asked for content relations; hierarchy relations are
# derived mechanically from corpus metadata at graph build.
DEFAULT_SCHEMA: tuple[RelationType, ...] = tuple(
    r for r in RelationType if r in CONTENT_RELATIONS
)


@dataclass(frozen=True)
class ProvenancedTriple:
    """An accepted triple tied to the chunk it was extracted from."""

    subject: str
    relation: RelationType
    object: str
    chunk: Chunk


@dataclass(frozen=True)
class ChunkOutcome:
    chunk_id: str
    accepted: tuple[ResolvedTriple, ...] = ()
    skipped: tuple[SkippedRecord, ...] = ()
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class ExtractionReport:
    outcomes: list[ChunkOutcome] = field(default_factory=list)
    triples: list[ProvenancedTriple] = field(default_factory=list)

    @property
    def chunks_total(self) -> int:
        return len(self.outcomes)

    @property
    def chunks_failed(self) -> int:
        return sum(1 for o in self.outcomes if o.failed)

    @property
    def accepted_count(self) -> int:
        return len(self.triples)

    @property
    def skipped_count(self) -> int:
        return sum(len(o.skipped) for o in self.outcomes)

    @property
    def failure_rate(self) -> float:
        if not self.outcomes:
            return 0.0
        return self.chunks_failed / self.chunks_total

    def summary(self) -> str:
        return (
            f"chunks={self.chunks_total} failed={self.chunks_failed} "
            f"accepted={self.accepted_count} skipped={self.skipped_count}"
        )


def _run_chunk(
    chunk: Chunk,
    client: LlmClient,
    params: DecodingParams,
    schema: Sequence[RelationType] | None,
) -> tuple[Chunk, ChunkOutcome]:
    prompt = build_extraction_prompt(chunk, schema=schema)
    try:
        response = client.complete(prompt, params)
    except LlmError as exc:
        return chunk, ChunkOutcome(chunk_id=chunk.chunk_id, error=str(exc))
    outcome = parse_triple_response(response, schema=schema)
    return chunk, ChunkOutcome(
        chunk_id=chunk.chunk_id,
        accepted=tuple(outcome.accepted),
        skipped=tuple(outcome.skipped),
    )


def extract_corpus(
    chunks: Sequence[Chunk],
    client: LlmClient,
    *,
    params: DecodingParams | None = None,
    schema: Sequence[RelationType] | None = None,
    max_workers: int = DEFAULT_MAX_WORKERS,
    max_failure_rate: float = DEFAULT_MAX_FAILURE_RATE,
) -> ExtractionReport:
    """Extract triples from every chunk and return a canonical report.

    Raises ExtractionAbortedError (with the report attached) when the
    fraction of failed chunks exceeds ``max_failure_rate``.
    """
    if max_workers < 1:
        raise ValueError(f"max_workers must be >= 1, got {max_workers}")
    params = params or DecodingParams()
    schema = tuple(schema) if schema is not None else DEFAULT_SCHEMA

    results: list[tuple[Chunk, ChunkOutcome]] = []
    if chunks:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [
                pool.submit(_run_chunk, chunk, client, params, schema) for chunk in chunks
            ]
            results = [f.result() for f in futures]
    results.sort(key=lambda pair: pair[1].chunk_id)

    report = ExtractionReport()
    for chunk, outcome in results:
        report.outcomes.append(outcome)
        for triple in outcome.accepted:
            report.triples.append(
                ProvenancedTriple(
                    subject=triple.subject,
                    relation=triple.relation,
                    object=triple.object,
                    chunk=chunk,
                )
            )
    if report.failure_rate > max_failure_rate:
        raise ExtractionAbortedError(
            f"{report.chunks_failed} of {report.chunks_total} chunks failed, "
            f"above the tolerated rate of {max_failure_rate:.0%}",
            report=report,
        )
    return report
