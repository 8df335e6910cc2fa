from unirule.retrieval.search import SearchQuery, SearchResult, search
from unirule.retrieval.mcp import (
    APPLICATION_ERROR,
    DEFAULT_K,
    INVALID_PARAMS,
    METHOD_NOT_FOUND,
    PARSE_ERROR,
    MCPServer,
)

__all__ = [
    "SearchQuery",
    "SearchResult",
    "search",
    "MCPServer",
    "APPLICATION_ERROR",
    "DEFAULT_K",
    "INVALID_PARAMS",
    "METHOD_NOT_FOUND",
    "PARSE_ERROR",
]
