"""Content-derived chat behaviors that let the whole pipeline run offline.

Unlike scripted MockGateway entries, which are written per test, this
responder recognizes each pipeline prompt by a stable marker in its text
and synthesizes a deterministic reply from a hash of the prompt. Identical
inputs therefore produce byte-identical corpora, traces, judgments, and
reports on every run, with zero network traffic.
"""

import hashlib
import json
import re

from unirule.gateway.mock import MockGateway
from unirule.gateway.model import ChatMessage, ToolCall

# Small vocabulary for synthetic analyst prose. Tokens are interleaved with
# hash fragments so no constant run reaches the 40-char CTI leak threshold.
VOCAB = (
    "lateral",
    "beacon",
    "payload",
    "credential",
    "persistence",
    "proxy",
    "registry",
    "archive",
    "kerberos",
    "tunnel",
    "scheduled",
    "encoded",
    "spoofed",
    "staging",
    "exfil",
    "implant",
)

LANGUAGE_RE = re.compile(r"in the (\w+) rule language")

# Verdict mix: 8/20 first, 8/20 second, 4/20 tie. Balanced between the two
# positions so the position-bias audit stays inside its [0.4, 0.6] band.
VERDICT_BUCKETS = 20
FIRST_BELOW = 8
SECOND_BELOW = 16


def _digest(*parts: str) -> bytes:
    return hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()


def _word(digest: bytes, i: int) -> str:
    return VOCAB[digest[i] % len(VOCAB)]


def _first_user(messages) -> str:
    for message in messages:
        if message.role == "user":
            return message.content
    return ""


def _last_user(messages) -> str:
    for message in reversed(messages):
        if message.role == "user":
            return message.content
    return ""


def translation_reply(prompt: str, label: str) -> str:
    d = _digest("translate", label, prompt)
    h = d.hex()
    summary = f"{_word(d, 0)} {_word(d, 1)} activity tracked as {h[:8]}"
    detail = (
        f"The rule concerns {_word(d, 2)} {_word(d, 3)} behavior, marker "
        f"{h[8:16]}, where {_word(d, 4)} telemetry shows {_word(d, 5)} "
        f"patterns tied to {h[16:24]} on monitored hosts."
    )
    return f"{label}: {summary}. DETAIL: {detail}"


def cti_reply(prompt: str, salt: str = "") -> str:
    d = _digest("cti", salt, prompt)
    h = d.hex()
    w = [_word(d, i) for i in range(8)]
    return (
        f"Campaign {h[:8]} deployed {w[0]} {w[1]} tooling against "
        f"{w[2]} infrastructure. Analysts observed {w[3]} staging "
        f"followed by {w[4]} beaconing over {w[5]} channels. Defenders "
        f"should review {w[6]} telemetry for {w[7]} markers such as {h[8:16]}."
    )


def judge_reply(prompt: str) -> str:
    bucket = _digest("judge", prompt)[0] % VERDICT_BUCKETS
    if bucket < FIRST_BELOW:
        return "FIRST"
    if bucket < SECOND_BELOW:
        return "SECOND"
    return "TIE"


def rule_reply(language: str, d: bytes) -> str:
    h = d.hex()
    if language == "snort":
        sid = 100000 + int(h[:6], 16) % 800000
        return (
            f'alert tcp any any -> any any (msg:"synthetic {h[:8]}"; '
            f'content:"{h[8:16]}"; sid:{sid}; rev:1;)'
        )
    if language == "splunk":
        return (
            f"index=main sourcetype=endpoint process_name={h[:8]}.exe "
            f"| stats count by host"
        )
    if language == "elastic":
        return (
            f'process where process.name == "{h[:8]}.exe" and '
            f'process.command_line : "*{h[8:16]}*"'
        )
    return f"match {h[:16]}"


def _allowed_spaces(tools) -> list:
    return list(tools[0].parameters["properties"]["space"]["enum"])


def _generation_reply(messages, tools):
    """Final fenced rule, after a hash-chosen number of search calls.

    The call count (0-2) is derived from the threat context, so a fixed
    corpus always yields the same mix of zero-, one-, and two-iteration
    traces. Conversations without a tool offer (the one-shot baselines)
    answer immediately.
    """
    system = messages[0].content if messages[0].role == "system" else ""
    match = LANGUAGE_RE.search(system)
    language = match.group(1) if match else "generic"
    first_user = _first_user(messages)
    d = _digest("generate", language, first_user)

    if tools:
        target_calls = d[-1] % 3
        made = sum(1 for m in messages if m.role == "assistant")
        if made < target_calls:
            spaces = _allowed_spaces(tools)
            arguments = {
                "query": f"{_word(d, made)} {_word(d, made + 1)} behavior",
                "space": spaces[made % len(spaces)],
                "k": 5,
            }
            return ChatMessage(
                role="assistant",
                tool_calls=[
                    ToolCall(
                        name=tools[0].name,
                        arguments=json.dumps(arguments, sort_keys=True),
                        call_id=f"call-{d.hex()[:8]}-{made}",
                    )
                ],
            )
    return f"```{language}\n{rule_reply(language, d)}\n```"


def pipeline_responder(messages, tools=None):
    """Route a conversation to the matching synthetic behavior."""
    system = messages[0].content if messages[0].role == "system" else ""
    first_user = _first_user(messages)

    if "expert detection engineer" in system:
        return _generation_reply(messages, tools)
    if "Answer with exactly one word: FIRST, SECOND, or TIE" in first_user:
        return judge_reply(first_user)
    if "UNSTRUCTURED CTI REPORT" in first_user:
        salt = "retry" if "paraphrase everything" in _last_user(messages) else ""
        return cti_reply(first_user, salt)
    if "DETECTION INTENT" in first_user:
        return translation_reply(first_user, "INTENT")
    if "DETECTION LOGIC" in first_user:
        return translation_reply(first_user, "LOGIC")
    return None  # let MockGateway raise its unmatched-prompt error


def pipeline_gateway(embed_dim: int | None = None) -> MockGateway:
    """A MockGateway wired with the full-pipeline responder."""
    if embed_dim is None:
        return MockGateway(responder=pipeline_responder)
    return MockGateway(responder=pipeline_responder, embed_dim=embed_dim)
