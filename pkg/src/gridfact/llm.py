"""Hosted-model backends: fact extraction from text and match refinement.

Network access is isolated here.  The client speaks the common
chat-completions wire shape, retries transient failures with exponential
backoff, bounds concurrent requests, and caches responses on disk keyed by
(model, template id, template version, prompt) so reruns are offline and
byte-identical.

The API key is read from an environment variable at request time only.  It
is never stored on the client, never written to the cache, and never logged.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import requests

from .errors import (
    AuthFailure,
    BackendProtocolError,
    MalformedResponse,
    Unreachable,
)
from .templates import EXTRACT, REFINE, PromptTemplate

logger = logging.getLogger(__name__)

_RETRYABLE_STATUS = frozenset({429}) | frozenset(range(500, 600))
_CORRECTIVE = (
    "Reminder: reply with only a bare JSON array - no prose, no code fences."
)


@dataclass(frozen=True)
class BackendConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 30.0
    max_retries: int = 2
    backoff_base: float = 0.5
    cache_dir: Optional[str] = None
    max_in_flight: int = 4
    temperature: Optional[float] = None  # omit sampling params when None


def cache_key(model: str, template: PromptTemplate, prompt: str) -> str:
    payload = json.dumps(
        {
            "model": model,
            "prompt": prompt,
            "template_id": template.id,
            "template_version": template.version,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ChatClient:
    """Minimal chat-completions client with disk cache and bounded concurrency."""

    def __init__(self, config: BackendConfig = BackendConfig()):
        self.config = config
        self._gate = threading.BoundedSemaphore(config.max_in_flight)

    # -- cache --

    def _cache_path(self, key: str) -> Optional[Path]:
        if self.config.cache_dir is None:
            return None
        return Path(self.config.cache_dir) / f"{key}.json"

    def _cache_load(self, key: str, prompt: str, template: PromptTemplate) -> Optional[str]:
        path = self._cache_path(key)
        if path is None or not path.is_file():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError):
            logger.warning("unreadable cache entry %s; refetching", path.name)
            return None
        if entry.get("prompt") != prompt or entry.get("model") != self.config.model:
            logger.warning("cache entry %s does not match request; refetching", path.name)
            return None
        text = entry.get("response_text")
        return text if isinstance(text, str) else None

    def _cache_store(self, key: str, prompt: str, template: PromptTemplate, text: str) -> None:
        path = self._cache_path(key)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "model": self.config.model,
            "template_id": template.id,
            "template_version": template.version,
            "prompt": prompt,
            "response_text": text,
        }
        fd, tmp = tempfile.mkstemp(dir=str(path.parent), suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, ensure_ascii=False, indent=2, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    # -- transport --

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise AuthFailure(
                f"environment variable {self.config.api_key_env} is empty or unset"
            )
        return key

    def _post_once(self, template: PromptTemplate, prompt: str) -> requests.Response:
        payload = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": template.system},
                {"role": "user", "content": prompt},
            ],
        }
        if self.config.temperature is not None:
            payload["temperature"] = self.config.temperature
        headers = {
            "Authorization": f"Bearer {self._api_key()}",
            "Content-Type": "application/json",
        }
        with self._gate:
            return requests.post(
                f"{self.config.base_url.rstrip('/')}/chat/completions",
                json=payload,
                headers=headers,
                timeout=self.config.timeout,
            )

    def _request_text(self, template: PromptTemplate, prompt: str) -> str:
        last_error = "no attempt made"
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                delay = min(self.config.backoff_base * 2 ** (attempt - 1), self.config.timeout)
                time.sleep(delay)
            try:
                response = self._post_once(template, prompt)
            except requests.RequestException as exc:
                last_error = f"transport failure: {type(exc).__name__}"
                logger.warning("request attempt %d failed: %s", attempt + 1, last_error)
                continue
            status = response.status_code
            if status in (401, 403):
                raise AuthFailure(f"service rejected credentials (HTTP {status})")
            if status in _RETRYABLE_STATUS:
                last_error = f"HTTP {status}"
                logger.warning("request attempt %d failed: %s", attempt + 1, last_error)
                continue
            if status != 200:
                raise BackendProtocolError(f"service rejected request (HTTP {status})")
            try:
                body = response.json()
                content = body["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError):
                raise MalformedResponse("response body lacks choices[0].message.content")
            if not isinstance(content, str):
                raise MalformedResponse("message content is not text")
            return content
        raise Unreachable(
            f"giving up after {self.config.max_retries + 1} attempts; last error: {last_error}"
        )

    # -- public --

    def complete(self, template: PromptTemplate, prompt: str) -> str:
        """Cached chat completion; one assistant message in, text out."""
        key = cache_key(self.config.model, template, prompt)
        cached = self._cache_load(key, prompt, template)
        if cached is not None:
            return cached
        text = self._request_text(template, prompt)
        self._cache_store(key, prompt, template, text)
        return text


def parse_json_array(text: str) -> list:
    """Strict parse: the reply must be a bare JSON array."""
    try:
        value = json.loads(text)
    except ValueError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    if not isinstance(value, list):
        raise ValueError("top-level JSON value is not an array")
    return value


def _complete_json_array(client: ChatClient, template: PromptTemplate, prompt: str) -> list:
    """One completion plus at most one corrective reprompt on malformed output."""
    text = client.complete(template, prompt)
    try:
        return parse_json_array(text)
    except ValueError as first:
        logger.warning("malformed model reply (%s); reprompting once", first)
    text = client.complete(template, f"{prompt}\n{_CORRECTIVE}")
    try:
        return parse_json_array(text)
    except ValueError as exc:
        raise MalformedResponse(f"model reply is not a JSON array after reprompt: {exc}")


def _coerce_field(value) -> Optional[str]:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    return None


def llm_extract(text: str, client: ChatClient) -> list:
    """Extract (subject, predicate, object) string triples from prose."""
    prompt = EXTRACT.render(text=text)
    entries = _complete_json_array(client, EXTRACT, prompt)
    out = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            logger.warning("dropping extraction entry %d: not an object", i)
            continue
        subject = _coerce_field(entry.get("subject"))
        predicate = _coerce_field(entry.get("predicate"))
        obj = _coerce_field(entry.get("object"))
        if not subject or not predicate or obj is None:
            logger.warning("dropping extraction entry %d: missing field", i)
            continue
        out.append((subject, predicate, obj))
    return out


def _numbered_facts(facts) -> str:
    lines = []
    for i, t in enumerate(facts):
        raw = " ".join(t.object.raw.split())
        lines.append(f"{i}. {t.subject} | {t.predicate} | {raw}")
    return "\n".join(lines) if lines else "(none)"


def llm_refine(table_facts, source_facts, client: ChatClient) -> list:
    """Propose [table_index, source_index] pairs among unmatched facts."""
    if not table_facts or not source_facts:
        return []  # nothing to pair; never touch the network
    prompt = REFINE.render(
        table_facts=_numbered_facts(table_facts),
        source_facts=_numbered_facts(source_facts),
    )
    entries = _complete_json_array(client, REFINE, prompt)
    out = []
    for i, entry in enumerate(entries):
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in entry)
        ):
            logger.warning("dropping refinement entry %d: not an index pair", i)
            continue
        out.append((entry[0], entry[1]))
    return out


class LlmExtractionBackend:
    """Adapter: hosted-model extraction behind the text-extraction protocol."""

    deterministic = False

    def __init__(self, client: ChatClient):
        self.client = client
        self.name = f"llm:{client.config.model}"

    def extract(self, text: str) -> list:
        return llm_extract(text, self.client)


class LlmRefinementBackend:
    """Adapter: hosted-model pairing behind the match-refinement protocol."""

    def __init__(self, client: ChatClient):
        self.client = client
        self.name = f"llm:{client.config.model}"

    def propose(self, table_facts, source_facts) -> list:
        return llm_refine(table_facts, source_facts, self.client)
