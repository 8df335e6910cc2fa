"""Deterministic offline provider used by the whole test suite.

mock_embed derives a unit vector from a hash of the text, so embeddings are
stable across runs and machines. MockGateway replays scripted chat responses
matched against the last user message, in script order.
"""

import hashlib
import inspect
import threading

import numpy as np

from unirule.errors import ProviderError
from unirule.gateway.model import ChatMessage

MOCK_EMBED_DIM = 64


def mock_embed(text: str, dim: int = MOCK_EMBED_DIM) -> np.ndarray:
    """Hash-seeded unit vector; identical text gives a bitwise-equal vector."""
    seed = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")
    rng = np.random.default_rng(seed)
    vector = rng.standard_normal(dim)
    return vector / np.linalg.norm(vector)


def _last_user_content(messages: list) -> str:
    for message in reversed(messages):
        if message.role == "user":
            return message.content
    return ""


def _respond(responder, messages, tools):
    """Call a responder; two-parameter responders also see the tool offer."""
    try:
        takes_tools = len(inspect.signature(responder).parameters) >= 2
    except (TypeError, ValueError):  # builtins without introspectable signatures
        takes_tools = False
    return responder(messages, tools) if takes_tools else responder(messages)


class MockGateway:
    """Script-driven chat plus hash-based embeddings, no network ever.

    Scripts are (matcher, response) pairs. A matcher is a substring tested
    against the last user message, or a callable on the full message list.
    Each chat call consumes the first matching script entry; a fallback
    responder, when set, handles anything unscripted.
    """

    def __init__(self, responder=None, embed_dim: int = MOCK_EMBED_DIM):
        self._scripts = []
        self._lock = threading.Lock()
        self.responder = responder
        self.embed_dim = embed_dim
        self.chat_calls = []  # every message list seen, for assertions
        self.embed_calls = 0

    def script(self, match, response) -> "MockGateway":
        """Queue a canned response; returns self so scripts can be chained."""
        self._scripts.append((match, response))
        return self

    def _matches(self, match, messages) -> bool:
        if callable(match):
            return bool(match(messages))
        return match in _last_user_content(messages)

    def chat(self, messages: list, tools: list | None = None) -> ChatMessage:
        if not messages:
            raise ValueError("messages must be non-empty")
        with self._lock:
            self.chat_calls.append(list(messages))
            for i, (match, response) in enumerate(self._scripts):
                if self._matches(match, messages):
                    del self._scripts[i]
                    break
            else:
                response = self.responder
        if callable(response):
            response = _respond(response, messages, tools)
        if response is None:
            raise ProviderError(
                f"no scripted response for: {_last_user_content(messages)[:80]!r}"
            )
        if isinstance(response, str):
            response = ChatMessage(role="assistant", content=response)
        return response

    def embed(self, texts: list) -> list:
        if not texts or any(not t for t in texts):
            raise ValueError("texts must be non-empty and each text non-empty")
        with self._lock:
            self.embed_calls += 1
        return [mock_embed(text, self.embed_dim) for text in texts]
