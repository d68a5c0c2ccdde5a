"""Run configuration: a flat key = value file with ${ENV} interpolation.

Secrets never live in the file; values may reference environment variables
(e.g. ``llm.auth_token_env = LLM_TOKEN`` names the variable, while
``${VAR}`` splices a variable's value into any field at parse time).
Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field, fields

from .chunking import ChunkerConfig
from .embeddings import EmbeddingProviderConfig
from .errors import ConfigError
from .summarize import LlmProviderConfig

_ENV_REF = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


@dataclass
class RunConfig:
    chunker: ChunkerConfig = field(default_factory=ChunkerConfig)
    embedding: EmbeddingProviderConfig = field(default_factory=EmbeddingProviderConfig)
    llm: LlmProviderConfig = field(default_factory=LlmProviderConfig)
    k: int | None = None
    top_k: int = 5
    collapse_runs: bool = False
    path_cap: int = 22
    mode: str = "markov-cluster"
    seed: int = 0
    out_dir: str = "runs"

    def __post_init__(self):
        if self.mode not in ("markov-cluster", "cluster-sum", "llm-full"):
            raise ConfigError(f"unknown mode: {self.mode!r}")
        if self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.path_cap < 1:
            raise ConfigError("path_cap must be >= 1")

    def snapshot(self) -> dict:
        """JSON-ready copy of every setting; contains no secret values."""

        def plain(obj) -> dict:
            return {f.name: getattr(obj, f.name) for f in fields(obj)}

        return {
            "chunker": plain(self.chunker),
            "embedding": plain(self.embedding),
            "llm": plain(self.llm),
            "k": self.k,
            "top_k": self.top_k,
            "collapse_runs": self.collapse_runs,
            "path_cap": self.path_cap,
            "mode": self.mode,
            "seed": self.seed,
            "out_dir": self.out_dir,
        }


def _interpolate(value: str) -> str:
    def repl(m: re.Match) -> str:
        name = m.group(1)
        if name not in os.environ:
            raise ConfigError(f"config references undefined environment variable {name}")
        return os.environ[name]

    return _ENV_REF.sub(repl, value)


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment, blank lines skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = _interpolate(value.strip())
    return values


def _to_bool(raw: str, key: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _to_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}")


def _to_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}")


def config_from_mapping(values: dict[str, str]) -> RunConfig:
    """Build a RunConfig from flat dotted keys, applying defaults elsewhere."""
    chunker_kwargs: dict = {}
    embed_kwargs: dict = {}
    llm_kwargs: dict = {}
    top_kwargs: dict = {}

    spec: dict[str, tuple[dict, str, object]] = {
        "chunk_size": (chunker_kwargs, "chunk_size", int),
        "overlap": (chunker_kwargs, "overlap", int),
        "embedding.kind": (embed_kwargs, "kind", str),
        "embedding.endpoint": (embed_kwargs, "endpoint", str),
        "embedding.model_name": (embed_kwargs, "model_name", str),
        "embedding.auth_token_env": (embed_kwargs, "auth_token_env", str),
        "embedding.batch_size": (embed_kwargs, "batch_size", int),
        "embedding.timeout": (embed_kwargs, "timeout", float),
        "embedding.max_retries": (embed_kwargs, "max_retries", int),
        "embedding.parallelism": (embed_kwargs, "parallelism", int),
        "embedding.cache_dir": (embed_kwargs, "cache_dir", str),
        "embedding.model_field": (embed_kwargs, "model_field", str),
        "embedding.input_field": (embed_kwargs, "input_field", str),
        "embedding.vectors_key": (embed_kwargs, "vectors_key", str),
        "embedding.vector_field": (embed_kwargs, "vector_field", str),
        "llm.kind": (llm_kwargs, "kind", str),
        "llm.endpoint": (llm_kwargs, "endpoint", str),
        "llm.model_name": (llm_kwargs, "model_name", str),
        "llm.auth_token_env": (llm_kwargs, "auth_token_env", str),
        "llm.temperature": (llm_kwargs, "temperature", float),
        "llm.max_output_tokens": (llm_kwargs, "max_output_tokens", int),
        "llm.timeout": (llm_kwargs, "timeout", float),
        "llm.max_retries": (llm_kwargs, "max_retries", int),
        "llm.parallelism": (llm_kwargs, "parallelism", int),
        "llm.context_limit": (llm_kwargs, "context_limit", int),
        "llm.context_margin": (llm_kwargs, "context_margin", int),
        "k": (top_kwargs, "k", int),
        "top_k": (top_kwargs, "top_k", int),
        "collapse_runs": (top_kwargs, "collapse_runs", bool),
        "path_cap": (top_kwargs, "path_cap", int),
        "mode": (top_kwargs, "mode", str),
        "seed": (top_kwargs, "seed", int),
        "out_dir": (top_kwargs, "out_dir", str),
    }

    for key, raw in values.items():
        if key not in spec:
            raise ConfigError(f"unknown config key: {key!r}")
        target, name, kind = spec[key]
        if kind is int:
            target[name] = _to_int(raw, key)
        elif kind is float:
            target[name] = _to_float(raw, key)
        elif kind is bool:
            target[name] = _to_bool(raw, key)
        else:
            target[name] = raw

    try:
        return RunConfig(
            chunker=ChunkerConfig(**chunker_kwargs),
            embedding=EmbeddingProviderConfig(**embed_kwargs),
            llm=LlmProviderConfig(**llm_kwargs),
            **top_kwargs,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_mapping(parse_config_text(text))
