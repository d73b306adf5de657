"""Extraction prompt construction.

The prompt has five ordered parts (role, source metadata, task instructions,
output format constraints, a single worked example) followed by the passage
under analysis. Building is deterministic: identical chunks yield
byte-identical prompts.
"""

from __future__ import annotations

from typing import Sequence

from ..corpus import Chunk
from ..relations import RelationType

EXTRACTION_ROLE_PHRASE = "TCM knowledge analysis assistant"

# The passage is delimited so deterministic mock clients can recover it.
PASSAGE_BEGIN = "<<<PASSAGE"
PASSAGE_END = "PASSAGE>>>"

# Worked example shown to the model: a short classical-style passage and the
# triples it should yield.
FEW_SHOT_PASSAGE = "逍遥散治郁证，胁痛者宜之，用柴胡、当归、白芍。"
FEW_SHOT_OUTPUT = (
    "[\n"
    '  {"subject": "逍遥散", "predicate": "Treat Disease", "object": "郁证"},\n'
    '  {"subject": "逍遥散", "predicate": "Treatment Symptom", "object": "胁痛"},\n'
    '  {"subject": "逍遥散", "predicate": "Ingredient Use", "object": "柴胡"},\n'
    '  {"subject": "逍遥散", "predicate": "Ingredient Use", "object": "当归"},\n'
    '  {"subject": "逍遥散", "predicate": "Ingredient Use", "object": "白芍"}\n'
    "]"
)


def build_extraction_prompt(chunk: Chunk, schema: Sequence[RelationType] | None = None) -> str:
    """Render the extraction prompt for one chunk.

    ``schema`` defaults to all 10 relation types; narrowing it narrows the
    list the model is allowed to use.
    """
    if not chunk.text:
        raise ValueError(f"chunk {chunk.chunk_id!r} has empty text")
    relations = list(schema) if schema is not None else list(RelationType)
    relation_lines = "\n".join(f"- {r.value}" for r in relations)

    return (
        "## Role\n"
        f"You are a {EXTRACTION_ROLE_PHRASE}. You read passages from classical Chinese\n"
        "medical texts and extract structured, professionally accurate facts.\n"
        "\n"
        "## Source\n"
        f"- Book: {chunk.book_title}\n"
        f"- Section: {chunk.section_title}\n"
        f"- Chapter: {chunk.chapter_title}\n"
        f"- Chunk index: {chunk.chunk_index}\n"
        "\n"
        "## Task\n"
        "Extract every factual statement in the passage as a (subject, predicate,\n"
        "object) triple. Use only the following predicate types, exactly as written:\n"
        f"{relation_lines}\n"
        "Keep subject and object names verbatim from the text. Do not invent facts\n"
        "that the passage does not state.\n"
        "\n"
        "## Output format\n"
        "Respond with a single JSON array and nothing else. Each element must be an\n"
        'object with exactly the keys "subject", "predicate" and "object", all\n'
        "non-empty strings. Skip anything invalid or ambiguous rather than guessing.\n"
        "If the passage yields no valid triples, respond with [].\n"
        "\n"
        "## Example\n"
        f"Passage: “{FEW_SHOT_PASSAGE}”\n"
        "Output:\n"
        f"{FEW_SHOT_OUTPUT}\n"
        "\n"
        "## Passage\n"
        f"{PASSAGE_BEGIN}\n"
        f"{chunk.text}\n"
        f"{PASSAGE_END}\n"
    )
