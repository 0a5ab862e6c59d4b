"""Uniform chat-completion interface.

One production HTTP implementation speaking the OpenAI-compatible
chat-completions protocol, plus a deterministic mock for tests and a
record/replay pair for offline pipeline runs. Requests are addressed by a
stable hash of (model, temperature, messages), so any change to prompt
assembly invalidates recorded sessions loudly instead of silently serving
stale text.

The API key is read from an environment variable at call time and is never
logged or written to session files.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import requests

from .errors import BackendError, ConfigError, ParseError, ReplayMiss

DEFAULT_MODEL = "gpt-4.1-mini"
DEFAULT_API_KEY_ENV = "LLM_API_KEY"
# Step informalization wants format-faithful output; summarization wants
# natural prose. Both are overridable per request.
INFORMALIZE_TEMPERATURE = 0.4
SUMMARIZE_TEMPERATURE = 1.0

_ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in _ROLES:
            raise ConfigError(f"invalid message role '{self.role}'")


@dataclass(frozen=True)
class ChatRequest:
    model: str
    temperature: float
    messages: tuple[ChatMessage, ...]

    def __post_init__(self):
        if not self.messages:
            raise ConfigError("a chat request needs at least one message")
        if not 0.0 <= self.temperature <= 2.0:
            raise ConfigError(f"temperature {self.temperature} outside [0, 2]")

    def to_payload(self) -> dict:
        return {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
        }


def request_hash(request: ChatRequest) -> str:
    """Stable content hash used to key mock scripts and replay sessions."""
    canonical = json.dumps(
        {
            "model": request.model,
            "temperature": request.temperature,
            "messages": [[m.role, m.content] for m in request.messages],
        },
        sort_keys=True,
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def request_to_text(request: ChatRequest) -> str:
    """Readable rendering used for golden files and --dry-run prompt dumps."""
    parts = [f"model: {request.model}", f"temperature: {request.temperature}", ""]
    for message in request.messages:
        parts.append(f"[{message.role}]")
        parts.append(message.content)
        parts.append("")
    return "\n".join(parts)


@dataclass(frozen=True)
class BackendConfig:
    endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    api_key_env: str = DEFAULT_API_KEY_ENV
    model: str = DEFAULT_MODEL
    max_retries: int = 2
    timeout: float = 60.0
    max_in_flight: int = 4

    def __post_init__(self):
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight must be >= 1")


class Backend(Protocol):
    def complete(self, request: ChatRequest) -> str:
        """Return the first completion's content for the request."""
        ...


Transport = Callable[[str, dict, dict, float], "tuple[int, object]"]


def _requests_transport(url: str, headers: dict, payload: dict, timeout: float):
    response = requests.post(url, headers=headers, json=payload, timeout=timeout)
    try:
        body = response.json()
    except ValueError:
        body = None
    return response.status_code, body


class HttpBackend:
    """OpenAI-compatible chat-completions client with bounded retries.

    Transient transport failures and rate limits are retried with
    exponential backoff up to ``max_retries``; auth failures and malformed
    responses are terminal. A semaphore caps in-flight requests for
    concurrent callers.
    """

    def __init__(self, config: BackendConfig, transport: Transport | None = None, sleep=time.sleep):
        self.config = config
        self._transport = transport or _requests_transport
        self._sleep = sleep
        self._gate = threading.BoundedSemaphore(config.max_in_flight)

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise ConfigError(
                f"environment variable {self.config.api_key_env} is not set"
            )
        return key

    def complete(self, request: ChatRequest) -> str:
        headers = {"Authorization": f"Bearer {self._api_key()}"}
        payload = request.to_payload()
        last_error: BackendError | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                self._sleep(0.5 * 2 ** (attempt - 1))
            try:
                with self._gate:
                    status, body = self._transport(
                        self.config.endpoint_url, headers, payload, self.config.timeout
                    )
            except Exception as exc:
                last_error = BackendError("transport", str(exc))
                continue
            if status in (401, 403):
                raise BackendError("auth", f"HTTP {status} from {self.config.endpoint_url}")
            if status == 429:
                last_error = BackendError("rate_limit", "HTTP 429: rate limited")
                continue
            if status >= 500:
                last_error = BackendError("transport", f"HTTP {status}")
                continue
            if status != 200:
                raise BackendError("transport", f"HTTP {status}")
            return _extract_content(body)
        assert last_error is not None
        raise last_error


def _extract_content(body) -> str:
    try:
        content = body["choices"][0]["message"]["content"]
    except (TypeError, KeyError, IndexError):
        raise BackendError("malformed_response", "response lacks choices[0].message.content")
    if not isinstance(content, str):
        raise BackendError("malformed_response", "completion content is not text")
    return content


@dataclass
class MockBackend:
    """Deterministic backend for tests.

    Resolution order: ``reply_fn`` if given, then the scripted reply table
    keyed by request hash, then echo mode (returns the last user message
    verbatim). Every request is appended to ``calls``.
    """

    script: dict[str, str] = field(default_factory=dict)
    echo: bool = False
    reply_fn: Callable[[ChatRequest], str] | None = None
    calls: list[ChatRequest] = field(default_factory=list)

    def __post_init__(self):
        self._lock = threading.Lock()

    def add_reply(self, request: ChatRequest, text: str) -> None:
        self.script[request_hash(request)] = text

    def complete(self, request: ChatRequest) -> str:
        with self._lock:
            self.calls.append(request)
        if self.reply_fn is not None:
            return self.reply_fn(request)
        digest = request_hash(request)
        if digest in self.script:
            return self.script[digest]
        if self.echo:
            for message in reversed(request.messages):
                if message.role == "user":
                    return message.content
            raise LookupError("echo mode needs a user message")
        raise LookupError(f"no scripted reply for request {digest[:12]}")


class RecordingBackend:
    """Wrap a backend and append (hash, request, response) JSON lines."""

    def __init__(self, inner: Backend, session_path):
        self.inner = inner
        self.session_path = session_path
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        response = self.inner.complete(request)
        line = json.dumps(
            {"hash": request_hash(request), "request": request.to_payload(), "response": response},
            ensure_ascii=False,
        )
        with self._lock, open(self.session_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
        return response


class ReplayBackend:
    """Serve recorded responses by request hash; no network is touched.

    Responses recorded for the same hash are served in recording order; a
    request whose hash was never recorded (or is already exhausted) raises
    ReplayMiss so drifted prompts fail loudly.
    """

    def __init__(self, session_path):
        self._queues: dict[str, list[str]] = {}
        try:
            with open(session_path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        entry = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise ParseError(f"{session_path}:{lineno}: {exc.msg}") from exc
                    if not isinstance(entry, dict) or "hash" not in entry or "response" not in entry:
                        raise ParseError(f"{session_path}:{lineno}: expected {{hash, request, response}}")
                    self._queues.setdefault(entry["hash"], []).append(entry["response"])
        except OSError as exc:
            raise ConfigError(f"cannot read session file {session_path}: {exc.strerror or exc}") from exc
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        digest = request_hash(request)
        with self._lock:
            queue = self._queues.get(digest)
            if not queue:
                raise ReplayMiss(f"no recorded response for request {digest[:12]}")
            return queue.pop(0)
