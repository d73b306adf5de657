"""Configuration loading and client construction.

One YAML file configures the whole pipeline. Unknown keys are rejected
everywhere so typos fail loudly instead of silently using defaults. The
default LLM profile is the deterministic mock, so nothing in the default
configuration can reach the network.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError
from .extraction.client import HttpLlmClient, LlmClient, MockLlmClient
from .relations import RelationType, parse_relation
from .retrieval import DEFAULT_PATTERNS, PathPattern, PathStep


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ChunkingConfig(_StrictModel):
    size: int = Field(default=1000, gt=0)
    overlap: int = Field(default=100, ge=0)

    def model_post_init(self, _ctx) -> None:
        if self.overlap >= self.size:
            raise ValueError(f"overlap ({self.overlap}) must be smaller than size ({self.size})")


class LlmProfile(_StrictModel):
    kind: Literal["mock", "http"] = "mock"
    # http profile
    base_url: str = ""
    model: str = ""
    api_key_env: str = ""
    timeout_seconds: float = Field(default=120.0, gt=0)
    # mock profile
    responses_path: str = ""
    answer_text: str = ""
    # decoding
    temperature: float = Field(default=0.0, ge=0, le=2)
    max_tokens: int = Field(default=2048, gt=0)
    top_p: float = Field(default=1.0, gt=0, le=1)


class ExtractionConfig(_StrictModel):
    max_workers: int = Field(default=4, ge=1)
    max_failure_rate: float = Field(default=0.2, ge=0, le=1)


class PatternStepConfig(_StrictModel):
    relation: str
    direction: Literal["out", "in"]


class PatternConfig(_StrictModel):
    name: str
    steps: list[PatternStepConfig] = Field(min_length=1, max_length=4)


class RetrievalConfig(_StrictModel):
    link_limit: int = Field(default=8, ge=1)
    max_hops: int = Field(default=2, ge=1, le=4)
    decay: float = Field(default=0.8, gt=0, le=1)
    relation_weights: dict[str, float] = Field(default_factory=dict)
    context_budget: int = Field(default=2000, gt=0)
    aliases: dict[str, str] = Field(default_factory=dict)
    patterns: list[PatternConfig] = Field(default_factory=list)


class ServiceConfig(_StrictModel):
    host: str = "127.0.0.1"
    port: int = Field(default=8420, ge=1, le=65535)
    static_dir: str = ""
    max_inflight_llm: int = Field(default=4, ge=1)


class AppConfig(_StrictModel):
    corpus_path: str = ""
    snapshot_path: str = "graph.snapshot"
    chunking: ChunkingConfig = Field(default_factory=ChunkingConfig)
    llm: LlmProfile = Field(default_factory=LlmProfile)
    extraction: ExtractionConfig = Field(default_factory=ExtractionConfig)
    retrieval: RetrievalConfig = Field(default_factory=RetrievalConfig)
    service: ServiceConfig = Field(default_factory=ServiceConfig)


def load_config(path: str | Path) -> AppConfig:
    """Load and validate a YAML config file."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    try:
        config = AppConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return _anchor_paths(config, Path(path).resolve().parent)


def _anchor_paths(config: AppConfig, base: Path) -> AppConfig:
    """Resolve relative file paths against the config file's directory."""

    def resolve(p: str) -> str:
        if not p or Path(p).is_absolute():
            return p
        return str(base / p)

    config.corpus_path = resolve(config.corpus_path)
    config.snapshot_path = resolve(config.snapshot_path)
    config.llm.responses_path = resolve(config.llm.responses_path)
    config.service.static_dir = resolve(config.service.static_dir)
    return config


def _parse_weight_key(key: str) -> RelationType:
    relation = parse_relation(key)
    if relation is None:
        raise ConfigError(f"relation_weights: unknown relation {key!r}")
    return relation


def relation_weights(config: RetrievalConfig) -> dict[RelationType, float]:
    return {_parse_weight_key(k): v for k, v in config.relation_weights.items()}


def path_patterns(config: RetrievalConfig) -> tuple[PathPattern, ...]:
    """The configured pattern library, or the default one if none is given."""
    if not config.patterns:
        return DEFAULT_PATTERNS
    patterns = []
    for item in config.patterns:
        steps = []
        for step in item.steps:
            relation = parse_relation(step.relation)
            if relation is None:
                raise ConfigError(f"pattern {item.name!r}: unknown relation {step.relation!r}")
            steps.append(PathStep(relation, step.direction))
        patterns.append(PathPattern(item.name, tuple(steps)))
    return tuple(patterns)


def make_client(profile: LlmProfile) -> LlmClient:
    """Construct the LLM client a profile describes."""
    if profile.kind == "mock":
        responses = {}
        if profile.responses_path:
            try:
                raw = json.loads(Path(profile.responses_path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(
                    f"cannot load mock responses {profile.responses_path}: {exc}"
                ) from exc
            if not isinstance(raw, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in raw.items()
            ):
                raise ConfigError(
                    f"{profile.responses_path}: expected a JSON object of "
                    "fingerprint -> response text"
                )
            responses = raw
        return MockLlmClient(responses, answer_default=profile.answer_text)
    if not profile.base_url or not profile.model:
        raise ConfigError("http profile requires base_url and model")
    api_key = os.environ.get(profile.api_key_env, "") if profile.api_key_env else ""
    if profile.api_key_env and not api_key:
        raise ConfigError(f"environment variable {profile.api_key_env} is not set")
    return HttpLlmClient(
        profile.base_url,
        profile.model,
        api_key=api_key or None,
        timeout_seconds=profile.timeout_seconds,
    )
