"""Extraction prompts, response parsing, LLM clients, and the chunk pipeline."""

from __future__ import annotations

import json
import random

import httpx
import pytest

from tcmrag.corpus import Chunk
from tcmrag.errors import (
    ExtractionAbortedError,
    LlmError,
    LlmTransportError,
    ResponseTooLargeError,
)
from tcmrag.extraction import (
    DecodingParams,
    HttpLlmClient,
    MockLlmClient,
    build_extraction_prompt,
    chunk_fingerprint,
    extract_corpus,
    parse_triple_response,
)
from tcmrag.extraction.client import BACKOFF_BASE_SECONDS, MAX_RETRIES
from tcmrag.extraction.pipeline import DEFAULT_SCHEMA
from tcmrag.extraction.prompts import EXTRACTION_ROLE_PHRASE, PASSAGE_BEGIN, PASSAGE_END
from tcmrag.relations import CONTENT_RELATIONS, RelationType

from .oracles import reference_accepted_count, reference_find_array


def _chunk(text: str = "四物汤治月经不调。", **overrides) -> Chunk:
    fields = dict(
        chunk_id="B1#0000#0000",
        book_title="调经要略",
        section_title="调经",
        chapter_title="四物汤方论",
        chunk_index=0,
        text=text,
        char_span=(0, len(text)),
    )
    fields.update(overrides)
    return Chunk(**fields)


class TestExtractionPrompt:
    def test_sections_appear_in_order(self):
        prompt = build_extraction_prompt(_chunk())
        headers = ["## Role", "## Source", "## Task", "## Output format", "## Example", "## Passage"]
        positions = [prompt.index(h) for h in headers]
        assert positions == sorted(positions)

    def test_role_phrase_present(self):
        assert EXTRACTION_ROLE_PHRASE in build_extraction_prompt(_chunk())

    def test_passage_wrapped_in_markers(self):
        chunk = _chunk("血虚者补之。")
        prompt = build_extraction_prompt(chunk)
        assert f"{PASSAGE_BEGIN}\n血虚者补之。\n{PASSAGE_END}" in prompt

    def test_source_metadata_lines(self):
        prompt = build_extraction_prompt(_chunk(chunk_index=3))
        assert "- Book: 调经要略" in prompt
        assert "- Section: 调经" in prompt
        assert "- Chapter: 四物汤方论" in prompt
        assert "- Chunk index: 3" in prompt

    def test_default_schema_lists_all_relations(self):
        prompt = build_extraction_prompt(_chunk())
        for relation in RelationType:
            assert f"- {relation.value}" in prompt

    def test_narrowed_schema_drops_other_relations(self):
        prompt = build_extraction_prompt(_chunk(), schema=[RelationType.INGREDIENT_USE])
        assert f"- {RelationType.INGREDIENT_USE.value}" in prompt
        assert f"- {RelationType.TREAT_DISEASE.value}" not in prompt

    def test_deterministic(self):
        chunk = _chunk()
        assert build_extraction_prompt(chunk) == build_extraction_prompt(chunk)

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError, match="empty text"):
            build_extraction_prompt(_chunk(text=""))


def _triple(subject="四物汤", predicate="Treat Disease", object="月经不调", **extra):
    d = {"subject": subject, "predicate": predicate, "object": object}
    d.update(extra)
    return d


class TestParseTripleResponse:
    def test_plain_array(self):
        outcome = parse_triple_response(json.dumps([_triple()], ensure_ascii=False))
        assert len(outcome.accepted) == 1
        t = outcome.accepted[0]
        assert (t.subject, t.relation, t.object) == (
            "四物汤",
            RelationType.TREAT_DISEASE,
            "月经不调",
        )
        assert outcome.skipped == []
        assert outcome.diagnostics == "recovered array with 1 element(s)"

    def test_markdown_fenced_array(self):
        body = json.dumps([_triple()], ensure_ascii=False)
        outcome = parse_triple_response(f"```json\n{body}\n```")
        assert len(outcome.accepted) == 1

    def test_prose_around_array(self):
        body = json.dumps([_triple()], ensure_ascii=False)
        outcome = parse_triple_response(f"好的，提取结果如下：\n{body}\n以上即全部三元组。")
        assert len(outcome.accepted) == 1

    def test_brackets_inside_strings_do_not_confuse_recovery(self):
        body = json.dumps([_triple(subject="四物汤[加味]")], ensure_ascii=False)
        outcome = parse_triple_response(f"前缀 [ 不是数组 {body}")
        assert len(outcome.accepted) == 1
        assert outcome.accepted[0].subject == "四物汤[加味]"

    def test_first_wellformed_array_wins(self):
        first = json.dumps([_triple()], ensure_ascii=False)
        second = json.dumps([_triple(object="崩漏")], ensure_ascii=False)
        outcome = parse_triple_response(f"{first}\n{second}")
        assert [t.object for t in outcome.accepted] == ["月经不调"]

    def test_no_array_found(self):
        outcome = parse_triple_response("无法处理该段落。")
        assert outcome.accepted == [] and outcome.skipped == []
        assert outcome.diagnostics == "no JSON array found in response"

    def test_empty_array(self):
        outcome = parse_triple_response("[]")
        assert outcome.accepted == [] and outcome.skipped == []
        assert outcome.diagnostics == "recovered array with 0 element(s)"

    def test_values_are_stripped(self):
        outcome = parse_triple_response(
            json.dumps([_triple(subject="  四物汤 ", object=" 月经不调\n")], ensure_ascii=False)
        )
        assert outcome.accepted[0].subject == "四物汤"
        assert outcome.accepted[0].object == "月经不调"

    def test_predicate_resolution_is_tolerant(self):
        for surface in ("treat disease", "TREAT DISEASE", "TreatDisease", "treat_disease"):
            outcome = parse_triple_response(
                json.dumps([_triple(predicate=surface)], ensure_ascii=False)
            )
            assert outcome.accepted[0].relation is RelationType.TREAT_DISEASE, surface

    @pytest.mark.parametrize(
        "element, reason",
        [
            ({"subject": "a", "object": "b"}, "missing field: predicate"),
            ({"predicate": "Treat Disease", "object": "b"}, "missing field: subject"),
            (_triple(subject=7), "field is not a string: subject"),
            (_triple(object=["b"]), "field is not a string: object"),
            (_triple(subject="  "), "empty field: subject"),
            (_triple(confidence=0.9), "unexpected field(s): confidence"),
            (_triple(predicate="Cures"), "unknown predicate: Cures"),
            ("just a string", "element is not an object"),
            (["nested"], "element is not an object"),
            (None, "element is not an object"),
        ],
    )
    def test_skip_reasons(self, element, reason):
        outcome = parse_triple_response(json.dumps([element], ensure_ascii=False))
        assert outcome.accepted == []
        assert len(outcome.skipped) == 1
        assert outcome.skipped[0].reason == reason

    def test_mixed_array_splits_accepted_and_skipped(self):
        elements = [_triple(), {"bad": True}, _triple(object="崩漏"), _triple(predicate="related to")]
        outcome = parse_triple_response(json.dumps(elements, ensure_ascii=False))
        assert len(outcome.accepted) == 2
        assert len(outcome.skipped) == 2

    def test_schema_filters_valid_predicates(self):
        body = json.dumps([_triple(predicate="Belong to Book")], ensure_ascii=False)
        narrowed = parse_triple_response(body, schema=list(CONTENT_RELATIONS))
        assert narrowed.accepted == []
        assert narrowed.skipped[0].reason == "unknown predicate: Belong to Book"
        full = parse_triple_response(body)
        assert full.accepted[0].relation is RelationType.BELONG_TO_BOOK

    def test_oversize_response_raises(self):
        with pytest.raises(ResponseTooLargeError, match="limit"):
            parse_triple_response("[]" + " " * 100, max_response_chars=50)

    def test_content_problems_never_raise(self):
        rng = random.Random(4)
        for _ in range(200):
            junk = "".join(rng.choice('[]{}",:\\ 中文abc\n') for _ in range(rng.randint(0, 80)))
            parse_triple_response(junk)


class TestParserAgainstReference:
    SURFACES = {r.value for r in RelationType}

    def _random_response(self, rng: random.Random) -> str:
        elements = []
        for _ in range(rng.randint(0, 6)):
            roll = rng.random()
            if roll < 0.45:
                predicate = rng.choice(sorted(self.SURFACES))
                if rng.random() < 0.3:
                    predicate = predicate.upper() if rng.random() < 0.5 else predicate.replace(" ", "_")
                elements.append(_triple(predicate=predicate, subject=f"s{rng.randint(0, 9)}"))
            elif roll < 0.6:
                elements.append(_triple(predicate=rng.choice(["Cures", "related to", ""])))
            elif roll < 0.7:
                broken = _triple()
                del broken[rng.choice(["subject", "predicate", "object"])]
                elements.append(broken)
            elif roll < 0.8:
                elements.append(_triple(**{rng.choice(["subject", "object"]): rng.choice([3, None, []])}))
            elif roll < 0.9:
                elements.append(rng.choice(["text", 42, ["x"], None]))
            else:
                elements.append(_triple(note="extra"))
        body = json.dumps(elements, ensure_ascii=False)
        wrappers = [
            body,
            f"```json\n{body}\n```",
            f"提取结果：{body}",
            f"{body}\n完毕。",
            body.replace("[", "[ ", 1),
        ]
        response = rng.choice(wrappers)
        if rng.random() < 0.15:
            # truncate mid-stream to exercise recovery failure
            response = response[: rng.randint(0, len(response))]
        return response

    def test_accepted_counts_match_reference(self):
        rng = random.Random(20260819)
        for _ in range(300):
            response = self._random_response(rng)
            outcome = parse_triple_response(response)
            assert len(outcome.accepted) == reference_accepted_count(response, self.SURFACES), response

    def test_recovered_array_matches_reference(self):
        rng = random.Random(7)
        for _ in range(200):
            response = self._random_response(rng)
            outcome = parse_triple_response(response)
            reference = reference_find_array(response)
            if reference is None:
                assert outcome.diagnostics == "no JSON array found in response"
            else:
                assert outcome.diagnostics == f"recovered array with {len(reference)} element(s)"


class TestMockLlmClient:
    def test_scripted_response_by_passage_fingerprint(self):
        chunk = _chunk("当归补血。")
        scripted = json.dumps([_triple()], ensure_ascii=False)
        client = MockLlmClient({chunk_fingerprint(chunk.text): scripted})
        assert client.complete(build_extraction_prompt(chunk), DecodingParams()) == scripted

    def test_unscripted_passage_gets_extraction_default(self):
        client = MockLlmClient({})
        assert client.complete(build_extraction_prompt(_chunk()), DecodingParams()) == "[]"

    def test_prompt_without_markers_gets_answer_default(self):
        client = MockLlmClient({}, answer_default="默认回答")
        assert client.complete("回答这个问题", DecodingParams()) == "默认回答"

    def test_calls_are_recorded(self):
        client = MockLlmClient({})
        client.complete("a", DecodingParams())
        client.complete("b", DecodingParams())
        assert client.calls == ["a", "b"]

    def test_deterministic(self):
        prompt = build_extraction_prompt(_chunk())
        client = MockLlmClient({})
        assert client.complete(prompt, DecodingParams()) == client.complete(
            prompt, DecodingParams()
        )


class TestHttpLlmClient:
    def _response(self, status=200, text="ok", body=None):
        if body is None:
            body = {"choices": [{"message": {"content": text}}]}
        return httpx.Response(status, json=body)

    def test_success_returns_completion_text(self, monkeypatch):
        seen = {}

        def fake_post(url, json=None, headers=None, timeout=None):
            seen.update(url=url, json=json, headers=headers, timeout=timeout)
            return self._response(text="答案")

        monkeypatch.setattr("tcmrag.extraction.client.httpx.post", fake_post)
        client = HttpLlmClient("http://llm.local/v1/", "kimi", api_key="sk-x", timeout_seconds=9)
        text = client.complete("问题", DecodingParams(temperature=0.2, max_tokens=64))
        assert text == "答案"
        assert seen["url"] == "http://llm.local/v1/chat/completions"
        assert seen["json"]["model"] == "kimi"
        assert seen["json"]["temperature"] == 0.2
        assert seen["json"]["max_tokens"] == 64
        assert seen["json"]["messages"] == [{"role": "user", "content": "问题"}]
        assert seen["headers"]["Authorization"] == "Bearer sk-x"
        assert seen["timeout"] == 9

    def test_no_auth_header_without_key(self, monkeypatch):
        seen = {}

        def fake_post(url, json=None, headers=None, timeout=None):
            seen.update(headers=headers)
            return self._response()

        monkeypatch.setattr("tcmrag.extraction.client.httpx.post", fake_post)
        HttpLlmClient("http://llm.local", "m").complete("q", DecodingParams())
        assert "Authorization" not in seen["headers"]

    def test_retries_retryable_status_with_backoff(self, monkeypatch):
        statuses = iter([503, 429])
        sleeps: list[float] = []

        def fake_post(url, **kwargs):
            try:
                return httpx.Response(next(statuses), text="busy")
            except StopIteration:
                return self._response(text="ok")

        monkeypatch.setattr("tcmrag.extraction.client.httpx.post", fake_post)
        client = HttpLlmClient("http://llm.local", "m", sleep=sleeps.append)
        assert client.complete("q", DecodingParams()) == "ok"
        assert sleeps == [BACKOFF_BASE_SECONDS, BACKOFF_BASE_SECONDS * 2]

    def test_transport_errors_exhaust_retries(self, monkeypatch):
        attempts = []
        sleeps: list[float] = []

        def fake_post(url, **kwargs):
            attempts.append(url)
            raise httpx.ConnectError("unreachable")

        monkeypatch.setattr("tcmrag.extraction.client.httpx.post", fake_post)
        client = HttpLlmClient("http://llm.local", "m", sleep=sleeps.append)
        with pytest.raises(LlmTransportError, match="request failed"):
            client.complete("q", DecodingParams())
        assert len(attempts) == MAX_RETRIES + 1
        assert sleeps == [1.0, 2.0, 4.0]

    def test_non_retryable_status_raises_immediately(self, monkeypatch):
        attempts = []

        def fake_post(url, **kwargs):
            attempts.append(url)
            return httpx.Response(400, text="bad request")

        monkeypatch.setattr("tcmrag.extraction.client.httpx.post", fake_post)
        with pytest.raises(LlmError, match="400"):
            HttpLlmClient("http://llm.local", "m", sleep=lambda s: None).complete(
                "q", DecodingParams()
            )
        assert len(attempts) == 1

    @pytest.mark.parametrize(
        "body",
        [{"choices": []}, {"choices": [{"message": {}}]}, {"other": 1}, {"choices": [{"message": {"content": 5}}]}],
    )
    def test_malformed_payload_raises_llm_error(self, monkeypatch, body):
        monkeypatch.setattr(
            "tcmrag.extraction.client.httpx.post",
            lambda url, **kwargs: httpx.Response(200, json=body),
        )
        with pytest.raises(LlmError):
            HttpLlmClient("http://llm.local", "m").complete("q", DecodingParams())


class _FailingClient:
    """Raises LlmError for prompts containing any of the ``failing`` texts."""

    def __init__(self, failing: set[str]):
        self._failing = failing

    def complete(self, prompt: str, params: DecodingParams) -> str:
        if any(text in prompt for text in self._failing):
            raise LlmError("scripted failure")
        return "[]"


def _chunks(n: int) -> list[Chunk]:
    return [
        _chunk(text=f"段落{i}：四物汤治月经不调。", chunk_id=f"B1#{i:04d}#0000")
        for i in range(n)
    ]


class TestExtractCorpus:
    def test_demo_counts(self, mock_client):
        from tcmrag.demo import demo_books, demo_chunks

        report = extract_corpus(demo_chunks(demo_books()), mock_client)
        assert report.chunks_total == 12
        assert report.chunks_failed == 0
        assert report.accepted_count == 40
        assert report.skipped_count == 3
        assert report.summary() == "chunks=12 failed=0 accepted=40 skipped=3"

    def test_outcomes_sorted_by_chunk_id(self, mock_client):
        from tcmrag.demo import demo_books, demo_chunks

        chunks = demo_chunks(demo_books())
        report = extract_corpus(list(reversed(chunks)), mock_client, max_workers=4)
        ids = [o.chunk_id for o in report.outcomes]
        assert ids == sorted(ids)

    def test_worker_count_does_not_change_result(self, mock_client):
        from tcmrag.demo import demo_books, demo_chunks, demo_client

        chunks = demo_chunks(demo_books())
        serial = extract_corpus(chunks, demo_client(), max_workers=1)
        parallel = extract_corpus(chunks, mock_client, max_workers=8)
        assert [
            (t.subject, t.relation, t.object, t.chunk.chunk_id) for t in serial.triples
        ] == [(t.subject, t.relation, t.object, t.chunk.chunk_id) for t in parallel.triples]

    def test_triples_carry_their_chunk(self, mock_client):
        from tcmrag.demo import demo_books, demo_chunks

        report = extract_corpus(demo_chunks(demo_books()), mock_client)
        for triple in report.triples:
            assert triple.chunk.chunk_id.startswith(("B1#", "B2#", "B3#"))

    def test_default_schema_is_content_relations_only(self):
        assert set(DEFAULT_SCHEMA) == set(CONTENT_RELATIONS)
        assert all(r in CONTENT_RELATIONS for r in DEFAULT_SCHEMA)

    def test_structural_predicates_skipped_under_default_schema(self):
        chunk = _chunk("某书某章。")
        scripted = json.dumps(
            [{"subject": "某章", "predicate": "Belong to Book", "object": "某书"}],
            ensure_ascii=False,
        )
        client = MockLlmClient({chunk_fingerprint(chunk.text): scripted})
        report = extract_corpus([chunk], client)
        assert report.accepted_count == 0
        assert report.skipped_count == 1

    def test_failed_chunks_recorded_not_raised_below_threshold(self):
        chunks = _chunks(10)
        failing = {chunks[3].text}
        report = extract_corpus(chunks, _FailingClient(failing), max_failure_rate=0.2)
        assert report.chunks_failed == 1
        failed = [o for o in report.outcomes if o.failed]
        assert len(failed) == 1
        assert failed[0].chunk_id == chunks[3].chunk_id
        assert "scripted failure" in failed[0].error

    def test_failure_rate_above_threshold_aborts_with_report(self):
        chunks = _chunks(10)
        failing = {c.text for c in chunks[:3]}
        with pytest.raises(ExtractionAbortedError) as exc_info:
            extract_corpus(chunks, _FailingClient(failing), max_failure_rate=0.2)
        report = exc_info.value.report
        assert report is not None
        assert report.chunks_failed == 3
        assert report.chunks_total == 10

    def test_failure_rate_exactly_at_threshold_passes(self):
        chunks = _chunks(10)
        failing = {c.text for c in chunks[:2]}
        report = extract_corpus(chunks, _FailingClient(failing), max_failure_rate=0.2)
        assert report.chunks_failed == 2

    def test_invalid_worker_count_rejected(self):
        with pytest.raises(ValueError, match="max_workers"):
            extract_corpus([], MockLlmClient({}), max_workers=0)

    def test_empty_corpus_yields_empty_report(self):
        report = extract_corpus([], MockLlmClient({}))
        assert report.chunks_total == 0
        assert report.failure_rate == 0.0
        assert report.triples == []
