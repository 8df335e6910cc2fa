from unirule.gateway.model import (
    ChatMessage,
    ProviderConfig,
    ToolCall,
    ToolSpec,
    ENV_API_BASE,
    ENV_API_KEY,
    ENV_CHAT_MODEL,
    ENV_EMBED_MODEL,
)
from unirule.gateway.openai_api import OpenAIGateway
from unirule.gateway.mock import MockGateway, mock_embed, MOCK_EMBED_DIM
from unirule.gateway.pipeline_mock import pipeline_gateway, pipeline_responder

__all__ = [
    "ChatMessage",
    "ProviderConfig",
    "ToolCall",
    "ToolSpec",
    "ENV_API_BASE",
    "ENV_API_KEY",
    "ENV_CHAT_MODEL",
    "ENV_EMBED_MODEL",
    "OpenAIGateway",
    "MockGateway",
    "mock_embed",
    "MOCK_EMBED_DIM",
    "pipeline_gateway",
    "pipeline_responder",
]
