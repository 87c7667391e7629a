"""Chat-completion clients for the opponent selector.

Three interchangeable backends share one `query(prompt, config)` surface:

  HTTPChatClient   talks to an OpenAI-style /chat/completions endpoint
  MockClient       pure function of the prompt over a bundled fixture set
  ScriptedClient   replays a fixed response sequence (retry-path tests)

Transport failures map to distinct exception types so callers can count
attempts without string matching.
"""

from __future__ import annotations

import hashlib
import json
import os
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

API_KEY_ENV = "TTA_LLM_API_KEY"
FIXTURE_PACKAGE = "tta"
FIXTURE_SUBDIR = "data/llm_fixtures"


class LLMClientError(RuntimeError):
    """Base for everything a client query can raise."""


class TransportTimeout(LLMClientError):
    pass


class TransportHTTPError(LLMClientError):
    def __init__(self, status: int, message: str):
        super().__init__(f"HTTP {status}: {message}")
        self.status = status


class PromptTooLarge(LLMClientError):
    pass


@dataclass(frozen=True)
class LLMClientConfig:
    endpoint: str = ""
    model: str = ""
    temperature: float = 0.6
    max_tokens: int = 1024
    timeout_seconds: float = 30.0
    retry_limit: int = 3
    max_prompt_chars: int = 120_000

    def __post_init__(self):
        if self.retry_limit < 1:
            raise ValueError("retry_limit must be at least 1")
        if self.timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be positive")
        if self.max_prompt_chars < 1:
            raise ValueError("max_prompt_chars must be positive")

    def to_dict(self) -> dict:
        from dataclasses import asdict

        return asdict(self)


def _check_prompt_size(prompt: str, config: LLMClientConfig) -> None:
    # Pre-flight so an oversized prompt fails before any network traffic.
    if len(prompt) > config.max_prompt_chars:
        raise PromptTooLarge(
            f"prompt is {len(prompt)} chars, limit {config.max_prompt_chars}"
        )


class HTTPChatClient:
    """Minimal chat-completions caller. No streaming, one message, the
    assistant text comes back verbatim."""

    def query(self, prompt: str, config: LLMClientConfig) -> str:
        _check_prompt_size(prompt, config)
        if not config.endpoint:
            raise LLMClientError("config.endpoint is empty")
        payload = {
            "model": config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": config.temperature,
            "max_tokens": config.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        request = urllib.request.Request(
            config.endpoint,
            data=json.dumps(payload).encode("utf-8"),
            headers=headers,
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=config.timeout_seconds) as resp:
                body = resp.read().decode("utf-8")
        except urllib.error.HTTPError as exc:
            raise TransportHTTPError(exc.code, exc.reason) from exc
        except socket.timeout as exc:
            raise TransportTimeout(str(exc)) from exc
        except TimeoutError as exc:
            raise TransportTimeout(str(exc)) from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, (socket.timeout, TimeoutError)):
                raise TransportTimeout(str(exc.reason)) from exc
            raise LLMClientError(f"transport failure: {exc.reason}") from exc
        try:
            doc = json.loads(body)
            content = doc["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
            raise LLMClientError(f"malformed completion response: {exc}") from exc
        if not isinstance(content, str):
            raise LLMClientError("completion content is not a string")
        return content


def bundled_fixture_dir() -> Path:
    return Path(str(resources.files(FIXTURE_PACKAGE) / FIXTURE_SUBDIR))


def load_fixture_texts(fixture_dir: str | Path | None = None) -> dict[str, str]:
    """Read every .txt fixture in the directory, keyed by stem, sorted order."""
    root = Path(fixture_dir) if fixture_dir is not None else bundled_fixture_dir()
    if not root.is_dir():
        raise FileNotFoundError(f"fixture directory not found: {root}")
    texts = {}
    for path in sorted(root.glob("*.txt")):
        texts[path.stem] = path.read_text(encoding="utf-8")
    if not texts:
        raise FileNotFoundError(f"no .txt fixtures under {root}")
    return texts


class MockClient:
    """Deterministic stand-in: the response is a pure function of the prompt.

    The prompt's sha256 indexes into the sorted fixture list, so the same
    prompt always yields the same canned text and different prompts spread
    across the set.
    """

    def __init__(self, fixture_dir: str | Path | None = None):
        self._texts = load_fixture_texts(fixture_dir)
        self._names = sorted(self._texts)

    @property
    def fixture_names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def fixture(self, name: str) -> str:
        return self._texts[name]

    def fixture_for(self, prompt: str) -> str:
        digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
        return self._names[int(digest, 16) % len(self._names)]

    def query(self, prompt: str, config: LLMClientConfig) -> str:
        _check_prompt_size(prompt, config)
        return self._texts[self.fixture_for(prompt)]


class ScriptedClient:
    """Returns queued responses in order; an entry may be an exception
    instance to simulate a transport failure on that attempt."""

    def __init__(self, responses: list[str | Exception]):
        self._queue = list(responses)
        self.calls = 0

    def query(self, prompt: str, config: LLMClientConfig) -> str:
        _check_prompt_size(prompt, config)
        if not self._queue:
            raise LLMClientError("scripted client ran out of responses")
        self.calls += 1
        item = self._queue.pop(0)
        if isinstance(item, Exception):
            raise item
        return item
