"""JSON-RPC 2.0 tool server exposing search_rules over stdio or TCP.

Messages are Content-Length framed on the wire; bare newline-delimited JSON
is accepted on input as well, since both framings circulate among clients.
"""

import json
import socketserver
import sys

import unirule
from unirule.errors import UniruleError
from unirule.kb import DIMENSIONS
from unirule.retrieval.search import SearchQuery, search

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
APPLICATION_ERROR = -32000

PROTOCOL_VERSION = "2024-11-05"
DEFAULT_K = 15

TOOL_SCHEMA = {
    "name": "search_rules",
    "description": (
        "Search the detection-rule knowledge base. Returns the top-k rules "
        "most similar to the query in the chosen semantic space."
    ),
    "inputSchema": {
        "type": "object",
        "properties": {
            "query": {"type": "string", "description": "natural language query"},
            "space": {"type": "string", "enum": list(DIMENSIONS)},
            "k": {"type": "integer", "minimum": 1, "default": DEFAULT_K},
            "language": {
                "type": "string",
                "description": "optional rule language filter",
            },
        },
        "required": ["query", "space"],
    },
}


def _error(message_id, code: int, message: str) -> dict:
    return {"jsonrpc": "2.0", "id": message_id, "error": {"code": code, "message": message}}


def _result(message_id, result) -> dict:
    return {"jsonrpc": "2.0", "id": message_id, "result": result}


class MCPServer:
    def __init__(self, indexes: dict, gateway, name: str = "unirule-retrieval"):
        self.indexes = indexes
        self.gateway = gateway
        self.name = name

    def _call_search_rules(self, arguments: dict) -> list:
        query = arguments.get("query")
        space = arguments.get("space")
        k = arguments.get("k", DEFAULT_K)
        language = arguments.get("language")
        if not isinstance(query, str) or not query.strip():
            raise ValueError("query must be a non-empty string")
        if space not in DIMENSIONS or space not in self.indexes:
            raise ValueError(f"space must be one of {DIMENSIONS}, got {space!r}")
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise ValueError(f"k must be a positive integer, got {k!r}")
        if language is not None and not isinstance(language, str):
            raise ValueError("language must be a string when given")
        results = search(
            self.indexes,
            SearchQuery(query=query, space=space, k=k, language_filter=language),
            self.gateway,
        )
        return [r.to_record() for r in results]

    def handle(self, message: dict) -> dict | None:
        message_id = message.get("id")
        method = message.get("method")
        if message.get("jsonrpc") != "2.0" or not isinstance(method, str):
            return _error(message_id, INVALID_REQUEST, "not a JSON-RPC 2.0 request")

        if method == "initialize":
            return _result(
                message_id,
                {
                    "protocolVersion": PROTOCOL_VERSION,
                    "capabilities": {"tools": {}},
                    "serverInfo": {"name": self.name, "version": unirule.__version__},
                },
            )
        if method == "notifications/initialized":
            return None
        if method == "tools/list":
            return _result(message_id, {"tools": [TOOL_SCHEMA]})
        if method == "tools/call":
            params = message.get("params") or {}
            tool = params.get("name")
            if tool != "search_rules":
                return _error(message_id, INVALID_PARAMS, f"unknown tool {tool!r}")
            try:
                rows = self._call_search_rules(params.get("arguments") or {})
            except ValueError as exc:
                return _error(message_id, INVALID_PARAMS, str(exc))
            except UniruleError as exc:
                return _error(
                    message_id, APPLICATION_ERROR, f"{type(exc).__name__}: {exc}"
                )
            text = json.dumps(rows, ensure_ascii=False, sort_keys=True)
            return _result(
                message_id, {"content": [{"type": "text", "text": text}]}
            )
        return _error(message_id, METHOD_NOT_FOUND, f"no such method {method!r}")

    def handle_text(self, text: str) -> dict | None:
        try:
            message = json.loads(text)
        except json.JSONDecodeError as exc:
            return _error(None, PARSE_ERROR, f"parse error: {exc}")
        if not isinstance(message, dict):
            return _error(None, INVALID_REQUEST, "request must be a JSON object")
        return self.handle(message)

    def serve_stream(self, reader, writer) -> None:
        """Frame-decode requests from reader until EOF, answering on writer."""
        while True:
            body = _read_message(reader)
            if body is None:
                return
            if not body.strip():
                continue
            response = self.handle_text(body)
            if response is not None:
                _write_message(writer, response)

    def serve_stdio(self) -> None:
        self.serve_stream(sys.stdin.buffer, sys.stdout.buffer)

    def serve_tcp(self, host: str = "127.0.0.1", port: int = 0):
        """Start a threaded TCP listener; caller owns shutdown."""
        server_self = self

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                server_self.serve_stream(self.rfile, self.wfile)

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        return Server((host, port), Handler)


def _read_message(reader) -> str | None:
    """One framed or bare-line JSON message; None at EOF."""
    line = reader.readline()
    if not line:
        return None
    text = line.decode("utf-8", errors="replace").strip()
    if text.lower().startswith("content-length:"):
        length = int(text.split(":", 1)[1].strip())
        while True:  # consume remaining headers up to the blank separator
            header = reader.readline()
            if not header or not header.strip():
                break
        return reader.read(length).decode("utf-8", errors="replace")
    return text


def _write_message(writer, response: dict) -> None:
    body = json.dumps(response, ensure_ascii=False, sort_keys=True).encode("utf-8")
    writer.write(f"Content-Length: {len(body)}\r\n\r\n".encode("ascii") + body)
    writer.flush()
