"""LLM client interface plus the two implementations we ship.

HttpLlmClient speaks an OpenAI-style chat completions endpoint over httpx.
MockLlmClient is a deterministic stand-in for tests and the bundled demo: it
answers extraction prompts by fingerprinting the passage between the prompt
markers and looking the fingerprint up in a scripted response table, so the
same prompt always yields the same response with no network involved.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from typing import Mapping, Protocol

import httpx

from ..errors import LlmError, LlmTransportError
from .prompts import PASSAGE_BEGIN, PASSAGE_END

MAX_RETRIES = 3
BACKOFF_BASE_SECONDS = 1.0
RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.0
    max_tokens: int = 2048
    top_p: float = 1.0


class LlmClient(Protocol):
    def complete(self, prompt: str, params: DecodingParams) -> str: ...


def chunk_fingerprint(text: str) -> str:
    """Stable identity for a chunk's text, used to key scripted responses."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _passage_of(prompt: str) -> str | None:
    begin = prompt.find(PASSAGE_BEGIN)
    if begin == -1:
        return None
    begin += len(PASSAGE_BEGIN)
    end = prompt.find(PASSAGE_END, begin)
    if end == -1:
        return None
    return prompt[begin:end].strip("\n")


class MockLlmClient:
    """Deterministic client: a pure function of (prompt, params).

    ``responses`` maps chunk fingerprints (see ``chunk_fingerprint``) to the
    raw response text to return for that chunk. Extraction prompts with an
    unscripted passage get ``extraction_default``; prompts without passage
    markers (question answering) get ``answer_default``.
    """

    def __init__(
        self,
        responses: Mapping[str, str] | None = None,
        *,
        extraction_default: str = "[]",
        answer_default: str = "",
    ) -> None:
        self._responses = dict(responses or {})
        self._extraction_default = extraction_default
        self._answer_default = answer_default
        self.calls: list[str] = []

    def complete(self, prompt: str, params: DecodingParams) -> str:
        self.calls.append(prompt)
        passage = _passage_of(prompt)
        if passage is None:
            return self._answer_default
        return self._responses.get(chunk_fingerprint(passage), self._extraction_default)


class HttpLlmClient:
    """Chat-completions client with bounded retry.

    Retries transport failures and retryable status codes (429 and the 5xx
    family) up to MAX_RETRIES times with exponential backoff starting at
    BACKOFF_BASE_SECONDS. Anything else raises immediately.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        *,
        api_key: str | None = None,
        timeout_seconds: float = 120.0,
        sleep=time.sleep,
    ) -> None:
        self._base_url = base_url.rstrip("/")
        self._model = model
        self._api_key = api_key
        self._timeout = timeout_seconds
        self._sleep = sleep

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        return headers

    def complete(self, prompt: str, params: DecodingParams) -> str:
        payload = {
            "model": self._model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "top_p": params.top_p,
        }
        url = f"{self._base_url}/chat/completions"
        last_error: Exception | None = None
        for attempt in range(MAX_RETRIES + 1):
            if attempt:
                self._sleep(BACKOFF_BASE_SECONDS * 2 ** (attempt - 1))
            try:
                response = httpx.post(
                    url, json=payload, headers=self._headers(), timeout=self._timeout
                )
            except httpx.TransportError as exc:
                last_error = LlmTransportError(f"request failed: {exc}")
                continue
            if response.status_code in RETRYABLE_STATUS:
                last_error = LlmTransportError(
                    f"server returned {response.status_code}: {response.text[:200]}"
                )
                continue
            if response.status_code != 200:
                raise LlmError(
                    f"server returned {response.status_code}: {response.text[:200]}"
                )
            return self._extract_text(response)
        assert last_error is not None
        raise last_error

    @staticmethod
    def _extract_text(response: httpx.Response) -> str:
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise LlmError(f"malformed completion payload: {exc}") from exc
        if not isinstance(text, str):
            raise LlmError("completion content is not a string")
        return text
