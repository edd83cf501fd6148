"""Pluggable completion backends with a uniform retry/timeout policy.

Three kinds: ``live`` speaks the OpenAI-compatible chat-completions wire
protocol over HTTP; ``replay`` serves responses from a recorded cassette
keyed by a content hash of the prompt bundle; ``scripted`` pops queued
responses for tests. A shared semaphore bounds in-flight requests.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .prompting import PromptBundle

DEFAULT_CREDENTIAL_ENV = "OPENAI_API_KEY"
DEFAULT_MODEL = "gpt-4o"

_RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class BackendError(Exception):
    pass


class CredentialMissingError(BackendError):
    def __init__(self, env: str):
        super().__init__(f"no API credential: environment variable {env} is unset")


class TransportError(BackendError):
    pass


class ReplayMissError(BackendError):
    def __init__(self, key: str, bundle: PromptBundle):
        self.key = key
        super().__init__(
            f"cassette has no entry {key[:12]}… for case {bundle.case_id!r} step {bundle.step!r}; "
            "re-record after prompt changes"
        )


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "live"  # live | replay | scripted
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = DEFAULT_MODEL
    temperature: float = 0.0
    max_in_flight: int = 4
    timeout: float = 60.0
    retries: int = 2
    backoff: float = 0.5
    cassette_path: str | None = None
    credential_env: str = DEFAULT_CREDENTIAL_ENV

    def __post_init__(self):
        if self.kind not in ("live", "replay", "scripted"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.kind == "replay" and not self.cassette_path:
            raise ValueError("replay backend needs a cassette_path")


@dataclass(frozen=True)
class RawResponse:
    text: str
    usage: dict = field(default_factory=dict)
    latency: float = 0.0
    backend_id: str = ""


def cassette_key(bundle: PromptBundle) -> str:
    """Content hash identifying a bundle in a cassette.

    Any change to the template version, step, case, or assembled prompt
    text produces a different key, so stale recordings fail loudly.
    """
    h = hashlib.sha256()
    for part in (bundle.template_version, bundle.step, bundle.case_id, bundle.user_text):
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


class LiveBackend:
    def __init__(self, cfg: BackendConfig):
        self.cfg = cfg
        key = os.environ.get(cfg.credential_env, "").strip()
        if not key:
            raise CredentialMissingError(cfg.credential_env)
        self._headers = {
            "Authorization": f"Bearer {key}",
            "Content-Type": "application/json",
        }

    def complete(self, bundle: PromptBundle) -> RawResponse:
        payload = {
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "messages": [
                {"role": "system", "content": bundle.system_text},
                {"role": "user", "content": bundle.user_text},
            ],
        }
        last_error: Exception | None = None
        for attempt in range(self.cfg.retries + 1):
            if attempt:
                time.sleep(self.cfg.backoff * 2 ** (attempt - 1))
            start = time.monotonic()
            try:
                resp = requests.post(
                    self.cfg.endpoint,
                    headers=self._headers,
                    json=payload,
                    timeout=self.cfg.timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code in _RETRYABLE_STATUS:
                last_error = TransportError(f"HTTP {resp.status_code} from {self.cfg.endpoint}")
                continue
            if resp.status_code != 200:
                raise TransportError(
                    f"HTTP {resp.status_code} from {self.cfg.endpoint}: {resp.text[:200]}"
                )
            try:
                data = resp.json()
                text = data["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"malformed completion payload: {exc}") from exc
            return RawResponse(
                text=text,
                usage=dict(data.get("usage") or {}),
                latency=time.monotonic() - start,
                backend_id=f"live:{self.cfg.model}",
            )
        raise TransportError(
            f"request failed after {self.cfg.retries + 1} attempt(s): {last_error}"
        )


class ReplayBackend:
    def __init__(self, cfg: BackendConfig):
        self.cfg = cfg
        path = Path(cfg.cassette_path)
        if not path.is_file():
            raise BackendError(f"cassette not found: {path}")
        data = json.loads(path.read_text())
        self._entries: dict[str, dict] = data.get("entries", {})

    def complete(self, bundle: PromptBundle) -> RawResponse:
        key = cassette_key(bundle)
        entry = self._entries.get(key)
        if entry is None:
            raise ReplayMissError(key, bundle)
        return RawResponse(
            text=entry["text"],
            usage=dict(entry.get("usage") or {}),
            latency=0.0,
            backend_id="replay",
        )


class ScriptedBackend:
    """Pops queued responses in order; queue entries may be response text,
    an exception instance to raise, or a callable of the bundle."""

    def __init__(self, responses=(), delay: float = 0.0):
        self._queue = list(responses)
        self._lock = threading.Lock()
        self._in_flight = 0
        self.max_observed_in_flight = 0
        self.delay = delay
        self.calls: list[PromptBundle] = []

    def push(self, *responses) -> None:
        with self._lock:
            self._queue.extend(responses)

    def complete(self, bundle: PromptBundle) -> RawResponse:
        with self._lock:
            self._in_flight += 1
            self.max_observed_in_flight = max(self.max_observed_in_flight, self._in_flight)
            self.calls.append(bundle)
            if not self._queue:
                self._in_flight -= 1
                raise BackendError("scripted backend queue is empty")
            item = self._queue.pop(0)
        try:
            if self.delay:
                time.sleep(self.delay)
            if isinstance(item, Exception):
                raise item
            text = item(bundle) if callable(item) else str(item)
            return RawResponse(text=text, latency=0.0, backend_id="scripted")
        finally:
            with self._lock:
                self._in_flight -= 1


class CompletionClient:
    """Backend plus the in-flight bound; safe for concurrent use."""

    def __init__(self, cfg: BackendConfig, backend=None):
        self.cfg = cfg
        if backend is not None:
            self.backend = backend
        elif cfg.kind == "live":
            self.backend = LiveBackend(cfg)
        elif cfg.kind == "replay":
            self.backend = ReplayBackend(cfg)
        else:
            self.backend = ScriptedBackend()
        self._slots = threading.Semaphore(cfg.max_in_flight)

    def complete(self, bundle: PromptBundle) -> RawResponse:
        with self._slots:
            return self.backend.complete(bundle)


def complete(bundle: PromptBundle, cfg: BackendConfig) -> RawResponse:
    """One-shot completion; builds a throwaway client."""
    return CompletionClient(cfg).complete(bundle)


def record_cassette(bundles, cfg_live: BackendConfig, path: str | Path) -> Path:
    """Run every bundle against the live backend and write the cassette."""
    client = CompletionClient(cfg_live)
    entries: dict[str, dict] = {}
    for bundle in bundles:
        response = client.complete(bundle)
        entries[cassette_key(bundle)] = {
            "text": response.text,
            "usage": response.usage,
            "step": bundle.step,
            "case_id": bundle.case_id,
        }
    return write_cassette(entries, cfg_live.model, path)


def write_cassette(entries: dict[str, dict], model: str, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps({"version": 1, "model": model, "entries": entries}, indent=2, sort_keys=True)
            + "\n"
        )
    except OSError as exc:
        raise BackendError(f"cannot write cassette {path}: {exc}") from exc
    return path
