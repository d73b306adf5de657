"""Triple extraction: prompt building, LLM clients, response parsing, pipeline."""

from .client import (
    DecodingParams,
    HttpLlmClient,
    LlmClient,
    MockLlmClient,
    chunk_fingerprint,
)
from .parsing import ParseOutcome, RawTriple, ResolvedTriple, SkippedRecord, parse_triple_response
from .pipeline import ChunkOutcome, ExtractionReport, ProvenancedTriple, extract_corpus
from .prompts import EXTRACTION_ROLE_PHRASE, PASSAGE_BEGIN, PASSAGE_END, build_extraction_prompt

__all__ = [
    "DecodingParams",
    "HttpLlmClient",
    "LlmClient",
    "MockLlmClient",
    "chunk_fingerprint",
    "ParseOutcome",
    "RawTriple",
    "ResolvedTriple",
    "SkippedRecord",
    "parse_triple_response",
    "ChunkOutcome",
    "ExtractionReport",
    "ProvenancedTriple",
    "extract_corpus",
    "EXTRACTION_ROLE_PHRASE",
    "PASSAGE_BEGIN",
    "PASSAGE_END",
    "build_extraction_prompt",
]
