"""Chat/embedding data types shared by all providers."""

import os
from dataclasses import dataclass, field

ROLES = ("system", "user", "assistant", "tool")

ENV_API_BASE = "UNIRULE_API_BASE"
ENV_API_KEY = "UNIRULE_API_KEY"
ENV_CHAT_MODEL = "UNIRULE_CHAT_MODEL"
ENV_EMBED_MODEL = "UNIRULE_EMBED_MODEL"


@dataclass
class ToolCall:
    """One tool invocation requested by the assistant."""

    name: str
    arguments: str  # structured text, JSON object as emitted by the provider
    call_id: str


@dataclass
class ToolSpec:
    """Schema of a tool offered to the model."""

    name: str
    description: str
    parameters: dict


@dataclass
class ChatMessage:
    role: str
    content: str = ""
    tool_calls: list | None = None
    tool_call_id: str | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if self.role == "tool" and not self.tool_call_id:
            raise ValueError("tool message requires tool_call_id")
        if self.role == "assistant" and not self.content and not self.tool_calls:
            raise ValueError("assistant message must carry content or tool calls")


@dataclass
class ProviderConfig:
    base_url: str
    api_key: str = ""
    chat_model: str = ""
    embed_model: str = ""
    max_retries: int = 3
    request_timeout: float = 60.0
    max_parallel_requests: int = 4

    def __post_init__(self):
        if self.max_parallel_requests < 1:
            raise ValueError("max_parallel_requests must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    @classmethod
    def from_env(cls, **overrides) -> "ProviderConfig":
        """Build a config from UNIRULE_* environment variables."""
        values = {
            "base_url": os.environ.get(ENV_API_BASE, "http://localhost:8000/v1"),
            "api_key": os.environ.get(ENV_API_KEY, ""),
            "chat_model": os.environ.get(ENV_CHAT_MODEL, ""),
            "embed_model": os.environ.get(ENV_EMBED_MODEL, ""),
        }
        values.update(overrides)
        return cls(**values)
