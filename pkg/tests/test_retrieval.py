"""Search exactness against a brute-force oracle, and the MCP tool server."""

import io
import json
import socket
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_entry, make_index
from unirule.gateway import MockGateway, mock_embed
from unirule.retrieval import (
    INVALID_PARAMS,
    METHOD_NOT_FOUND,
    PARSE_ERROR,
    MCPServer,
    SearchQuery,
    search,
)

LANGS = ("snort", "splunk", "elastic")


def build_random_index(n: int, dimension: str = "intent", tie_groups: int = 0):
    """n entries; tie_groups pairs share the same text, hence the same vector."""
    entries = []
    for i in range(n):
        text = f"description text {i % (n - tie_groups) if tie_groups else i}"
        entries.append(
            make_entry(f"rule-{i:05d}", text, language=LANGS[i % 3], dimension=dimension)
        )
    return make_index(entries, dimension)


def brute_force_top_k(index, query_text, k, language=None):
    """Independent oracle: plain-Python dot products, then a full sort."""
    query_vector = mock_embed(query_text)
    scored = []
    for entry in index.entries:
        if language is not None and entry.language != language:
            continue
        score = sum(
            float(a) * float(b)
            for a, b in zip(entry.vector.astype(np.float64), query_vector)
        )
        scored.append((entry.rule.id, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


@pytest.fixture
def small_indexes():
    entries = [
        make_entry("r-a", "lateral movement via psexec"),
        make_entry("r-b", "dns tunneling detection"),
        make_entry("r-c", "ssh brute force", language="splunk"),
        make_entry("r-d", "kernel module persistence", language="elastic"),
    ]
    return {"intent": make_index(entries, "intent")}


class TestSearch:
    def test_identity_query_scores_one(self, small_indexes):
        result = search(
            small_indexes,
            SearchQuery(query="dns tunneling detection", space="intent", k=3),
            MockGateway(),
        )
        assert result[0].rule.id == "r-b"
        assert abs(result[0].score - 1.0) < 1e-6

    def test_k_clamped_to_index_size(self, small_indexes):
        result = search(
            small_indexes,
            SearchQuery(query="anything", space="intent", k=10),
            MockGateway(),
        )
        assert len(result) == 4

    def test_language_filter_soundness(self, small_indexes):
        result = search(
            small_indexes,
            SearchQuery(query="x", space="intent", k=10, language_filter="splunk"),
            MockGateway(),
        )
        assert [r.rule.id for r in result] == ["r-c"]
        assert all(r.language == "splunk" for r in result)

    def test_empty_after_filter_returns_empty(self, small_indexes):
        result = search(
            small_indexes,
            SearchQuery(query="x", space="intent", k=5, language_filter="sigma"),
            MockGateway(),
        )
        assert result == []

    def test_unknown_space_raises(self, small_indexes):
        with pytest.raises(ValueError):
            search(
                small_indexes,
                SearchQuery(query="x", space="logic", k=1),
                MockGateway(),
            )

    def test_deterministic_including_tie_order(self):
        index = {"intent": build_random_index(60, tie_groups=10)}
        ask = lambda: [
            (r.rule.id, r.score)
            for r in search(
                index, SearchQuery(query="tied", space="intent", k=20), MockGateway()
            )
        ]
        assert ask() == ask()

    def test_ties_break_by_rule_id_ascending(self):
        entries = [
            make_entry("r-z", "identical text"),
            make_entry("r-a", "identical text"),
            make_entry("r-m", "identical text"),
        ]
        index = {"intent": make_index(entries)}
        result = search(
            index, SearchQuery(query="identical text", space="intent", k=3), MockGateway()
        )
        assert [r.rule.id for r in result] == ["r-a", "r-m", "r-z"]

    def test_scores_bounded(self):
        index = {"intent": build_random_index(100)}
        result = search(
            index, SearchQuery(query="bound check", space="intent", k=100), MockGateway()
        )
        assert all(-1.0 - 1e-6 <= r.score <= 1.0 + 1e-6 for r in result)

    def test_matches_brute_force_oracle(self):
        index = build_random_index(200, tie_groups=20)
        indexes = {"intent": index}
        for qi in range(10):
            query_text = f"probe query {qi}"
            for k in (1, 5, 15):
                got = [
                    (r.rule.id, r.score)
                    for r in search(
                        indexes,
                        SearchQuery(query=query_text, space="intent", k=k),
                        MockGateway(),
                    )
                ]
                expected = brute_force_top_k(index, query_text, k)
                assert [g[0] for g in got] == [e[0] for e in expected]
                for g, e in zip(got, expected):
                    assert g[1] == pytest.approx(e[1], abs=1e-9)

    @given(
        k=st.integers(min_value=1, max_value=30),
        language=st.sampled_from([None, "snort", "splunk", "elastic"]),
        probe=st.integers(min_value=0, max_value=10**6),
    )
    @settings(max_examples=40, deadline=None)
    def test_filter_and_order_properties(self, k, language, probe):
        index = _PROPERTY_INDEX
        result = search(
            {"intent": index},
            SearchQuery(query=f"probe {probe}", space="intent", k=k, language_filter=language),
            MockGateway(),
        )
        assert len(result) <= k
        if language is not None:
            assert all(r.language == language for r in result)
        scores = [r.score for r in result]
        assert scores == sorted(scores, reverse=True)

    def test_query_cache_short_circuits_embedding(self, small_indexes):
        gateway = MockGateway()
        cache = {}
        query = SearchQuery(query="repeated", space="intent", k=2)
        search(small_indexes, query, gateway, query_cache=cache)
        search(small_indexes, query, gateway, query_cache=cache)
        assert gateway.embed_calls == 1


_PROPERTY_INDEX = build_random_index(90, tie_groups=15)


class TestSearchQueryValidation:
    def test_empty_query(self):
        with pytest.raises(ValueError):
            SearchQuery(query="  ", space="intent", k=1)

    def test_bad_k(self):
        with pytest.raises(ValueError):
            SearchQuery(query="q", space="intent", k=0)


class TestMCPServer:
    @pytest.fixture
    def server(self, small_indexes):
        return MCPServer(small_indexes, MockGateway())

    def request(self, method, params=None, message_id=1):
        message = {"jsonrpc": "2.0", "id": message_id, "method": method}
        if params is not None:
            message["params"] = params
        return message

    def test_initialize(self, server):
        response = server.handle(self.request("initialize"))
        assert response["result"]["serverInfo"]["name"] == "unirule-retrieval"
        assert "tools" in response["result"]["capabilities"]

    def test_tools_list_single_tool(self, server):
        response = server.handle(self.request("tools/list"))
        tools = response["result"]["tools"]
        assert len(tools) == 1
        assert tools[0]["name"] == "search_rules"
        properties = tools[0]["inputSchema"]["properties"]
        assert set(properties) == {"query", "space", "k", "language"}

    def test_call_matches_direct_search(self, server, small_indexes):
        response = server.handle(
            self.request(
                "tools/call",
                {
                    "name": "search_rules",
                    "arguments": {"query": "dns tunneling detection", "space": "intent", "k": 2},
                },
            )
        )
        rows = json.loads(response["result"]["content"][0]["text"])
        direct = search(
            small_indexes,
            SearchQuery(query="dns tunneling detection", space="intent", k=2),
            MockGateway(),
        )
        assert rows[0]["rule_id"] == direct[0].rule.id
        assert rows[0]["score"] == round(direct[0].score, 6)
        assert set(rows[0]) == {
            "rule_id",
            "language",
            "score",
            "description_summary",
            "rule_source_text",
        }

    def test_unknown_space_invalid_params(self, server):
        response = server.handle(
            self.request(
                "tools/call",
                {"name": "search_rules", "arguments": {"query": "x", "space": "color"}},
            )
        )
        assert response["error"]["code"] == INVALID_PARAMS

    def test_bad_k_invalid_params(self, server):
        response = server.handle(
            self.request(
                "tools/call",
                {"name": "search_rules", "arguments": {"query": "x", "space": "intent", "k": 0}},
            )
        )
        assert response["error"]["code"] == INVALID_PARAMS

    def test_unknown_tool_invalid_params(self, server):
        response = server.handle(
            self.request("tools/call", {"name": "delete_rules", "arguments": {}})
        )
        assert response["error"]["code"] == INVALID_PARAMS

    def test_unknown_method(self, server):
        response = server.handle(self.request("resources/list"))
        assert response["error"]["code"] == METHOD_NOT_FOUND

    def test_parse_error(self, server):
        response = server.handle_text("{not json")
        assert response["error"]["code"] == PARSE_ERROR
        assert response["id"] is None

    def test_notification_gets_no_response(self, server):
        assert (
            server.handle({"jsonrpc": "2.0", "method": "notifications/initialized"})
            is None
        )

    def test_stream_accepts_framed_and_bare_lines(self, server):
        framed_body = json.dumps(self.request("tools/list", message_id=1)).encode()
        bare_body = json.dumps(self.request("initialize", message_id=2)).encode()
        request_bytes = (
            f"Content-Length: {len(framed_body)}\r\n\r\n".encode() + framed_body
            + bare_body + b"\n"
        )
        reader, writer = io.BytesIO(request_bytes), io.BytesIO()
        server.serve_stream(reader, writer)
        output = writer.getvalue().decode()
        assert output.count("Content-Length:") == 2
        assert '"search_rules"' in output
        assert '"protocolVersion"' in output

    def test_tcp_round_trip(self, server):
        tcp = server.serve_tcp()
        thread = threading.Thread(target=tcp.serve_forever, daemon=True)
        thread.start()
        try:
            with socket.create_connection(("127.0.0.1", tcp.server_address[1])) as conn:
                body = json.dumps(
                    self.request(
                        "tools/call",
                        {
                            "name": "search_rules",
                            "arguments": {"query": "ssh brute force", "space": "intent", "k": 1},
                        },
                    )
                ).encode()
                conn.sendall(f"Content-Length: {len(body)}\r\n\r\n".encode() + body)
                reader = conn.makefile("rb")
                header = reader.readline().decode()
                assert header.lower().startswith("content-length:")
                length = int(header.split(":")[1])
                assert reader.readline() == b"\r\n"
                response = json.loads(reader.read(length))
                rows = json.loads(response["result"]["content"][0]["text"])
                assert rows[0]["rule_id"] == "r-c"
        finally:
            tcp.shutdown()
            tcp.server_close()
