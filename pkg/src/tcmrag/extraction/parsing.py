"""Parsing of LLM extraction responses.

The output contract asks for a bare JSON array, but real model output drifts:
prose preambles, markdown fences, trailing commentary. The parser recovers
the first well-formed JSON array anywhere in the response, then applies the
skip rule element by element: a triple is accepted only if subject, predicate
and object are non-empty strings and the predicate resolves to a known
relation type; everything else is recorded as skipped with a reason. Content
problems never raise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import ResponseTooLargeError
from ..relations import RelationType, parse_relation

DEFAULT_MAX_RESPONSE_CHARS = 2_000_000


@dataclass(frozen=True)
class RawTriple:
    subject: str
    predicate: str
    object: str


@dataclass(frozen=True)
class ResolvedTriple:
    """A RawTriple whose predicate resolved to a RelationType."""

    subject: str
    relation: RelationType
    object: str


@dataclass(frozen=True)
class SkippedRecord:
    raw: str
    reason: str


@dataclass
class ParseOutcome:
    accepted: list[ResolvedTriple] = field(default_factory=list)
    skipped: list[SkippedRecord] = field(default_factory=list)
    diagnostics: str = ""


def _find_json_array(text: str) -> list | None:
    """Return the first well-formed JSON array in ``text``, or None.

    Scans for balanced ``[...]`` candidates, tracking string literals and
    escapes so brackets inside strings do not count, and accepts the first
    candidate that json.loads parses.
    """
    start = text.find("[")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
                continue
            if ch == '"':
                in_string = True
            elif ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
                if depth == 0:
                    candidate = text[start : i + 1]
                    try:
                        value = json.loads(candidate)
                    except json.JSONDecodeError:
                        break
                    if isinstance(value, list):
                        return value
                    break
        start = text.find("[", start + 1)
    return None


def _describe(element: object) -> str:
    try:
        return json.dumps(element, ensure_ascii=False)
    except (TypeError, ValueError):
        return repr(element)


def parse_triple_response(
    response: str,
    schema: Sequence[RelationType] | None = None,
    *,
    max_response_chars: int = DEFAULT_MAX_RESPONSE_CHARS,
) -> ParseOutcome:
    """Apply the output contract and skip rule to an arbitrary response text.

    Every element of the recovered array lands in either ``accepted`` or
    ``skipped``. Only a resource limit raises (ResponseTooLargeError).
    """
    if len(response) > max_response_chars:
        raise ResponseTooLargeError(
            f"response has {len(response)} chars, limit is {max_response_chars}"
        )
    allowed = frozenset(schema) if schema is not None else frozenset(RelationType)

    outcome = ParseOutcome()
    elements = _find_json_array(response)
    if elements is None:
        outcome.diagnostics = "no JSON array found in response"
        return outcome
    outcome.diagnostics = f"recovered array with {len(elements)} element(s)"

    for element in elements:
        if not isinstance(element, dict):
            outcome.skipped.append(SkippedRecord(_describe(element), "element is not an object"))
            continue
        triple: dict[str, str] = {}
        problem: str | None = None
        for key in ("subject", "predicate", "object"):
            value = element.get(key)
            if value is None:
                problem = f"missing field: {key}"
                break
            if not isinstance(value, str):
                problem = f"field is not a string: {key}"
                break
            if not value.strip():
                problem = f"empty field: {key}"
                break
            triple[key] = value.strip()
        if problem is None and set(element) - {"subject", "predicate", "object"}:
            extra = sorted(set(element) - {"subject", "predicate", "object"})
            problem = f"unexpected field(s): {', '.join(extra)}"
        if problem is not None:
            outcome.skipped.append(SkippedRecord(_describe(element), problem))
            continue
        relation = parse_relation(triple["predicate"])
        if relation is None or relation not in allowed:
            outcome.skipped.append(
                SkippedRecord(_describe(element), f"unknown predicate: {triple['predicate']}")
            )
            continue
        outcome.accepted.append(
            ResolvedTriple(subject=triple["subject"], relation=relation, object=triple["object"])
        )
    return outcome
