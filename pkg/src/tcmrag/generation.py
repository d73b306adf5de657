"""Cited answer generation over retrieved graph evidence.

The pipeline is link -> traverse -> score -> assemble -> prompt -> complete.
Citations are taken from the assembled context bundle, never parsed out of
model text, so the model cannot fabricate a source. When retrieval produces
no evidence the answer is degraded: it carries an explicit no-evidence note
and, by default, no LLM call is made at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .errors import GenerationError, LlmError
from .extraction.client import DecodingParams, LlmClient
from .graph.store import GraphStore
from .relations import RelationType
from .retrieval import (
    DEFAULT_CONTEXT_BUDGET,
    DEFAULT_DECAY,
    DEFAULT_LINK_LIMIT,
    DEFAULT_PATTERNS,
    Citation,
    ContextBundle,
    PathPattern,
    assemble_context,
    link_entities,
    score_paths,
    traverse,
)

DISCLAIMER = "本回答整理自古籍知识图谱，仅供学习参考，不构成诊疗建议。"
NO_EVIDENCE_NOTE = "知识图谱中没有检索到与问题相关的证据，无法给出有依据的回答。"


class AnswerMode(str, Enum):
    INGREDIENT_LOOKUP = "ingredient_lookup"
    DIAGNOSTIC_QA = "diagnostic_qa"


_MODE_TASK = {
    AnswerMode.INGREDIENT_LOOKUP: (
        "Write a short monograph for the ingredient or formula the question asks "
        "about: what it treats, what it contains, and where the sources say so."
    ),
    AnswerMode.DIAGNOSTIC_QA: (
        "Answer the diagnostic question: name the likely condition and the "
        "treatments the sources support, with their ingredients where relevant."
    ),
}


@dataclass
class RetrievalParams:
    link_limit: int = DEFAULT_LINK_LIMIT
    max_hops: int = 2
    patterns: Sequence[PathPattern] = DEFAULT_PATTERNS
    decay: float = DEFAULT_DECAY
    relation_weights: Mapping[RelationType, float] | None = None
    context_budget: int = DEFAULT_CONTEXT_BUDGET
    aliases: Mapping[str, str] | None = None
    # When retrieval finds nothing we normally skip the LLM entirely; set
    # this to let the model produce a context-free disclaimer answer instead.
    call_llm_when_degraded: bool = False


@dataclass
class Answer:
    question: str
    mode: AnswerMode
    text: str
    citations: list[Citation]
    context_used: ContextBundle
    degraded: bool


def build_answer_prompt(question: str, context: ContextBundle, mode: AnswerMode) -> str:
    """Deterministic answer prompt: the question verbatim, every evidence
    line verbatim, and the only-from-evidence instruction."""
    if not question.strip():
        raise ValueError("question is empty")
    if context.lines:
        evidence = context.rendered()
        evidence_clause = (
            "Answer ONLY from the evidence lines below. Cite the sources you use "
            "by repeating their (书, 章, 块) markers. If the evidence does not "
            "cover the question, say so.\n"
            "\n"
            "## Evidence\n"
            f"{evidence}\n"
        )
    else:
        evidence_clause = (
            "No graph evidence was retrieved for this question. Say explicitly "
            "that no supporting evidence was found; do not answer from general "
            "knowledge.\n"
        )
    return (
        "## Role\n"
        "You are a careful assistant for classical Chinese medical literature.\n"
        "\n"
        "## Task\n"
        f"{_MODE_TASK[mode]}\n"
        "\n"
        f"{evidence_clause}"
        "\n"
        "## Question\n"
        f"{question}\n"
    )


def _citations_of(bundle: ContextBundle) -> list[Citation]:
    ordered: list[Citation] = []
    seen: set[Citation] = set()
    for line in bundle.lines:
        if line.citation not in seen:
            seen.add(line.citation)
            ordered.append(line.citation)
    return ordered


def answer_question(
    question: str,
    store: GraphStore,
    client: LlmClient,
    params: RetrievalParams | None = None,
    mode: AnswerMode = AnswerMode.DIAGNOSTIC_QA,
    decoding: DecodingParams | None = None,
) -> Answer:
    """Run the full retrieval-augmented pipeline for one question."""
    params = params or RetrievalParams()
    matches = link_entities(store, question, params.link_limit, aliases=params.aliases)
    if matches:
        paths = traverse(store, [m.entity_id for m in matches], params.max_hops, params.patterns)
        scored = score_paths(paths, params.decay, params.relation_weights)
        bundle = assemble_context(store, scored, params.context_budget)
    else:
        bundle = ContextBundle(budget=params.context_budget)

    degraded = not bundle.lines
    if degraded and not params.call_llm_when_degraded:
        return Answer(
            question=question,
            mode=mode,
            text=f"{NO_EVIDENCE_NOTE}\n{DISCLAIMER}",
            citations=[],
            context_used=bundle,
            degraded=True,
        )

    prompt = build_answer_prompt(question, bundle, mode)
    try:
        text = client.complete(prompt, decoding or DecodingParams())
    except LlmError as exc:
        raise GenerationError(f"generation failed: {exc}", bundle=bundle) from exc
    return Answer(
        question=question,
        mode=mode,
        text=f"{text}\n{DISCLAIMER}" if text else f"{NO_EVIDENCE_NOTE}\n{DISCLAIMER}",
        citations=_citations_of(bundle),
        context_used=bundle,
        degraded=degraded,
    )


def answer_payload(answer: Answer) -> dict:
    """JSON-ready rendering shared by the CLI and the HTTP service."""
    return {
        "question": answer.question,
        "mode": answer.mode.value,
        "text": answer.text,
        "degraded": answer.degraded,
        "citations": [
            {
                "book": c.book,
                "chapter": c.chapter,
                "chunk_index": c.chunk_index,
                "chunk_id": c.chunk_id,
            }
            for c in answer.citations
        ],
        "context": [
            {
                "text": line.text,
                "score": line.score,
                "triple_id": line.triple_id,
                "subject": {
                    "id": line.subject_id,
                    "name": line.subject_name,
                    "category": line.subject_category,
                },
                "relation": line.relation.value,
                "object": {
                    "id": line.object_id,
                    "name": line.object_name,
                    "category": line.object_category,
                },
                "citation": {
                    "book": line.citation.book,
                    "chapter": line.citation.chapter,
                    "chunk_index": line.citation.chunk_index,
                    "chunk_id": line.citation.chunk_id,
                },
            }
            for line in answer.context_used.lines
        ],
    }
