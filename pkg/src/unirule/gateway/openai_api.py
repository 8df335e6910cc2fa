"""HTTP provider speaking the OpenAI-compatible wire protocol.

Retry with exponential backoff and bounded parallelism live here so every
pipeline stage shares one traffic knob. The sleep function is injectable to
keep retry tests instant.
"""

import json
import threading
import time

import numpy as np
import requests

from unirule.errors import DimensionMismatch, ProviderError, SchemaError
from unirule.gateway.model import ChatMessage, ProviderConfig, ToolCall

RETRYABLE_STATUS = (408, 409, 429, 500, 502, 503, 504)
BACKOFF_BASE_SECONDS = 0.5


def _serialize_message(message: ChatMessage) -> dict:
    payload = {"role": message.role, "content": message.content}
    if message.tool_calls:
        payload["tool_calls"] = [
            {
                "id": call.call_id,
                "type": "function",
                "function": {"name": call.name, "arguments": call.arguments},
            }
            for call in message.tool_calls
        ]
    if message.role == "tool":
        payload["tool_call_id"] = message.tool_call_id
    return payload


class OpenAIGateway:
    """Chat completion and embedding over POST {base}/chat/completions|embeddings."""

    def __init__(self, config: ProviderConfig, session=None, sleep=time.sleep):
        self.config = config
        self.session = session or requests.Session()
        self.sleep = sleep
        self._slots = threading.BoundedSemaphore(config.max_parallel_requests)
        self.attempts = 0  # total HTTP attempts, for fault-injection tests

    def _post(self, path: str, payload: dict) -> dict:
        url = self.config.base_url.rstrip("/") + path
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"

        last_error = None
        for attempt in range(self.config.max_retries + 1):
            if attempt > 0:
                self.sleep(BACKOFF_BASE_SECONDS * 2 ** (attempt - 1))
            self.attempts += 1
            try:
                with self._slots:
                    response = self.session.post(
                        url, json=payload, headers=headers,
                        timeout=self.config.request_timeout,
                    )
            except requests.RequestException as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if response.status_code == 200:
                try:
                    return response.json()
                except (json.JSONDecodeError, ValueError) as exc:
                    raise SchemaError(f"response body is not JSON: {exc}") from exc
            last_error = f"HTTP {response.status_code}: {response.text[:200]}"
            if response.status_code not in RETRYABLE_STATUS:
                raise ProviderError(last_error)
        raise ProviderError(
            f"exhausted {self.config.max_retries} retries for {url}: {last_error}"
        )

    def chat(self, messages: list, tools: list | None = None) -> ChatMessage:
        if not messages:
            raise ValueError("messages must be non-empty")
        if messages[0].role not in ("system", "user"):
            raise ValueError("conversation must open with a system or user message")

        payload = {
            "model": self.config.chat_model,
            "messages": [_serialize_message(m) for m in messages],
        }
        if tools:
            payload["tools"] = [
                {
                    "type": "function",
                    "function": {
                        "name": t.name,
                        "description": t.description,
                        "parameters": t.parameters,
                    },
                }
                for t in tools
            ]
        data = self._post("/chat/completions", payload)
        try:
            raw = data["choices"][0]["message"]
            tool_calls = None
            if raw.get("tool_calls"):
                tool_calls = [
                    ToolCall(
                        name=c["function"]["name"],
                        arguments=c["function"].get("arguments", "{}"),
                        call_id=c.get("id", f"call_{i}"),
                    )
                    for i, c in enumerate(raw["tool_calls"])
                ]
            return ChatMessage(
                role="assistant",
                content=raw.get("content") or "",
                tool_calls=tool_calls,
            )
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed chat completion response: {exc}") from exc

    def embed(self, texts: list) -> list:
        if not texts or any(not t for t in texts):
            raise ValueError("texts must be non-empty and each text non-empty")
        data = self._post(
            "/embeddings", {"model": self.config.embed_model, "input": list(texts)}
        )
        try:
            rows = sorted(data["data"], key=lambda item: item["index"])
            vectors = [np.asarray(row["embedding"], dtype=np.float64) for row in rows]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed embeddings response: {exc}") from exc
        if len(vectors) != len(texts):
            raise DimensionMismatch(
                f"asked for {len(texts)} embeddings, got {len(vectors)}"
            )
        dims = {v.shape for v in vectors}
        if len(dims) != 1 or vectors[0].ndim != 1:
            raise DimensionMismatch(f"ragged embedding shapes: {sorted(dims)}")
        return vectors
