"""Model provider abstraction: HTTP-backed and deterministic offline modes.

Every LLM touchpoint in the pipeline (summarize, extraction, match
adjudication, analytics translation, concept extraction, re-ranking)
goes through ``generate``; embeddings go through ``embed``. The
deterministic mode is a pure function of the request, which is what the
offline test and evaluation paths rely on.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import detrules, kernels
from .errors import ConfigError, EmptyInput, ProviderRejected, ProviderTimeout

DEFAULT_EMBEDDING_DIM = 256
RETRY_BACKOFF_SECONDS = (0.5, 1.0, 2.0)


@dataclass
class GenerationRequest:
    system_instructions: str
    user_content: str
    max_output_chars: int = 4000
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.max_output_chars <= 0:
            raise ValueError("max_output_chars must be > 0")


@dataclass
class EmbeddingVector:
    """Unit-norm embedding; normalized on creation."""

    values: np.ndarray
    model_tag: str

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise EmptyInput("zero-norm embedding")
        if abs(norm - 1.0) > 1e-6:
            arr = arr / norm
        self.values = arr

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


@dataclass
class ProviderConfig:
    mode: str = "deterministic"
    endpoint_url: str | None = None
    embedding_endpoint_url: str | None = None
    auth_token_env_var: str | None = None
    timeout_ms: int = 30000
    max_retries: int = 2
    max_in_flight: int = 4
    embedding_dim: int = DEFAULT_EMBEDDING_DIM
    cache_dir: str | None = None
    payload_template: dict | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("deterministic", "http"):
            raise ConfigError(f"unknown provider mode {self.mode!r}")
        if self.mode == "http" and not self.endpoint_url:
            raise ConfigError("http mode requires endpoint_url")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight must be >= 1")


def load_template(name: str) -> str:
    """Read a prompt template shipped with the package."""
    return resources.files("activitykg.templates").joinpath(f"{name}.txt").read_text("utf-8")


class ResponseCache:
    """On-disk request/response cache keyed by a digest of the request."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    @staticmethod
    def key(request: GenerationRequest, scope: str) -> str:
        payload = json.dumps(
            {
                "scope": scope,
                "system": request.system_instructions,
                "user": request.user_content,
                "max_chars": request.max_output_chars,
                "temperature": request.temperature,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.blake2b(payload.encode("utf-8"), digest_size=16).hexdigest()

    def get(self, key: str) -> str | None:
        path = self.directory / f"{key}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text("utf-8"))["output"]

    def put(self, key: str, output: str) -> None:
        with self._lock:
            path = self.directory / f"{key}.json"
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps({"output": output}), "utf-8")
            tmp.replace(path)


class Provider:
    """Common surface for both modes."""

    mode = "base"

    def generate(self, request: GenerationRequest) -> str:
        raise NotImplementedError

    def embed(self, text: str) -> EmbeddingVector:
        raise NotImplementedError


class DeterministicProvider(Provider):
    """Pure rule-table provider; no network, no state."""

    mode = "deterministic"

    def __init__(self, embedding_dim: int = DEFAULT_EMBEDDING_DIM) -> None:
        self.embedding_dim = embedding_dim

    def generate(self, request: GenerationRequest) -> str:
        task = detrules.task_tag(request.system_instructions)
        output = detrules.run(task, request.user_content)
        return detrules.truncate_sentences(output, request.max_output_chars) or output[: request.max_output_chars]

    def embed(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise EmptyInput("cannot embed empty text")
        values = kernels.embed(text.lower(), self.embedding_dim)
        return EmbeddingVector(values=values, model_tag=f"trigram-{self.embedding_dim}")


class HttpProvider(Provider):
    """Chat-completion style HTTP gateway client with retry and caching.

    Retries transport errors and 5xx responses with 0.5s/1s/2s backoff;
    non-success 4xx statuses raise ProviderRejected immediately. With
    temperature=0 responses are cached on disk, so reruns issue at most
    one live call per distinct request.
    """

    mode = "http"

    def __init__(self, config: ProviderConfig, sleep=time.sleep) -> None:
        import requests

        self.config = config
        self._session = requests.Session()
        self._sleep = sleep
        self._gate = threading.Semaphore(config.max_in_flight)
        self._cache = ResponseCache(config.cache_dir) if config.cache_dir else None
        self._fallback_embedder = DeterministicProvider(config.embedding_dim)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_token_env_var:
            token = os.environ.get(self.config.auth_token_env_var, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        return headers

    def _post(self, url: str, body: dict) -> dict:
        import requests

        attempts = self.config.max_retries + 1
        last_error = "no attempt made"
        for attempt in range(attempts):
            if attempt > 0:
                backoff = RETRY_BACKOFF_SECONDS[min(attempt - 1, len(RETRY_BACKOFF_SECONDS) - 1)]
                self._sleep(backoff)
            try:
                response = self._session.post(
                    url, json=body, headers=self._headers(), timeout=self.config.timeout_ms / 1000.0
                )
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                continue
            if response.status_code >= 500:
                last_error = f"status {response.status_code}"
                continue
            if response.status_code >= 400:
                raise ProviderRejected(f"status {response.status_code}: {response.text[:200]}")
            try:
                return response.json()
            except ValueError:
                last_error = "non-JSON response body"
                continue
        raise ProviderTimeout(f"gave up after {attempts} attempts ({last_error})")

    def generate(self, request: GenerationRequest) -> str:
        cache_key = None
        if self._cache is not None and request.temperature == 0.0:
            cache_key = ResponseCache.key(request, scope=self.config.endpoint_url or "")
            cached = self._cache.get(cache_key)
            if cached is not None:
                return cached
        template = self.config.payload_template or {
            "messages": [
                {"role": "system", "content": "{system}"},
                {"role": "user", "content": "{user}"},
            ],
            "max_output_chars": "{max_chars}",
            "temperature": "{temperature}",
        }
        body = _fill_template(template, request)
        with self._gate:
            payload = self._post(self.config.endpoint_url, body)
        output = payload.get("output_text")
        if not isinstance(output, str) or not output.strip():
            raise ProviderRejected("response missing output_text")
        output = detrules.truncate_sentences(output, request.max_output_chars) or output[: request.max_output_chars]
        if cache_key is not None:
            self._cache.put(cache_key, output)
        return output

    def embed(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise EmptyInput("cannot embed empty text")
        if not self.config.embedding_endpoint_url:
            # No embedding gateway configured: use the local embedder so
            # index contents stay consistent across runs.
            return self._fallback_embedder.embed(text)
        with self._gate:
            payload = self._post(self.config.embedding_endpoint_url, {"input": text})
        values = payload.get("embedding")
        if not isinstance(values, list) or not values:
            raise ProviderRejected("response missing embedding")
        return EmbeddingVector(values=np.asarray(values, dtype=np.float64), model_tag="http")


def _fill_template(template, request: GenerationRequest):
    if isinstance(template, dict):
        return {k: _fill_template(v, request) for k, v in template.items()}
    if isinstance(template, list):
        return [_fill_template(v, request) for v in template]
    if isinstance(template, str):
        if template == "{max_chars}":
            return request.max_output_chars
        if template == "{temperature}":
            return request.temperature
        return template.replace("{system}", request.system_instructions).replace(
            "{user}", request.user_content
        )
    return template


def build_provider(config: ProviderConfig, sleep=time.sleep) -> Provider:
    if config.mode == "http":
        return HttpProvider(config, sleep=sleep)
    return DeterministicProvider(config.embedding_dim)
