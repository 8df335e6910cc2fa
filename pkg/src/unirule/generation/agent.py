"""Agentic generation: a tool-calling loop over the dual semantic indexes.

The model decides its own retrieval strategy: zero calls is legal, and the
ablation modes expose only one of the two spaces while keeping the loop
mechanics identical. Every attempted tool call consumes budget, so a model
stuck emitting calls terminates with BudgetExceeded instead of spinning.
"""

import copy
import json
import re

from unirule.errors import BudgetExceeded, MalformedOutput
from unirule.gateway.model import ChatMessage, ToolSpec
from unirule.generation.traces import AgentBudget, GenerationTrace, RetrievalCall, dedup_results
from unirule.jsonl import dumps
from unirule.prompts import render_prompt
from unirule.retrieval.mcp import TOOL_SCHEMA
from unirule.retrieval.search import SearchQuery, search

SPACES_BY_MODE = {
    "unirule": ("intent", "logic"),
    "intent_only": ("intent",),
    "logic_only": ("logic",),
}

FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)
FENCE_REPROMPT = (
    "Reply again with exactly one fenced code block containing only the "
    "rule source, and no prose outside the fence."
)


def extract_rule_block(text: str | None) -> str | None:
    """The rule from exactly one fenced block; None on zero or several."""
    blocks = FENCE_RE.findall(text or "")
    if len(blocks) != 1:
        return None
    rule = blocks[0].strip()
    return rule or None


def search_tool_spec(allowed_spaces) -> ToolSpec:
    """The search_rules tool with its space enum narrowed per mode."""
    parameters = copy.deepcopy(TOOL_SCHEMA["inputSchema"])
    parameters["properties"]["space"]["enum"] = list(allowed_spaces)
    return ToolSpec(
        name=TOOL_SCHEMA["name"],
        description=TOOL_SCHEMA["description"],
        parameters=parameters,
    )


def new_usage() -> dict:
    return {"chat_calls": 0, "prompt_chars": 0, "completion_chars": 0}


def tracked_chat(gateway, messages, usage, tools=None) -> ChatMessage:
    usage["chat_calls"] += 1
    usage["prompt_chars"] += sum(len(m.content or "") for m in messages)
    reply = gateway.chat(messages, tools=tools)
    usage["completion_chars"] += len(reply.content or "")
    return reply


def context_prompt(context) -> str:
    return f"THREAT CONTEXT:\n{context.text}"


def _tool_error(message: str) -> str:
    return dumps({"error": message})


def generate_unirule(
    context,
    target_language: str,
    indexes: dict,
    gateway,
    budget: AgentBudget | None = None,
    mode: str = "unirule",
) -> GenerationTrace:
    """Run the retrieval loop until the model answers, then parse the rule.

    mode selects which spaces the tool exposes; a call naming a hidden
    space comes back as an error result, is logged with empty results, and
    the loop keeps going.
    """
    if mode not in SPACES_BY_MODE:
        raise ValueError(f"mode must be one of {sorted(SPACES_BY_MODE)}, got {mode!r}")
    budget = budget or AgentBudget()
    allowed = SPACES_BY_MODE[mode]
    tool = search_tool_spec(allowed)

    messages = [
        ChatMessage(role="system", content=render_prompt("generate_system", language=target_language)),
        ChatMessage(role="user", content=context_prompt(context)),
    ]
    usage = new_usage()
    calls: list = []
    attempts = 0
    query_cache: dict = {}
    reprompted = False

    while True:
        reply = tracked_chat(gateway, messages, usage, tools=[tool])
        messages.append(reply)

        if reply.tool_calls:
            for tool_call in reply.tool_calls:
                attempts += 1
                if attempts > budget.max_iterations:
                    raise BudgetExceeded(
                        f"agent attempted call {attempts} with "
                        f"max_iterations={budget.max_iterations}"
                    )
                content = _execute_tool_call(
                    tool_call, allowed, indexes, gateway, budget, calls, query_cache
                )
                messages.append(
                    ChatMessage(
                        role="tool", content=content, tool_call_id=tool_call.call_id
                    )
                )
            continue

        rule = extract_rule_block(reply.content)
        if rule is not None:
            break
        if reprompted:
            raise MalformedOutput(
                f"no single fenced rule block in final answer: {reply.content!r}"
            )
        reprompted = True
        messages.append(ChatMessage(role="user", content=FENCE_REPROMPT))

    return GenerationTrace(
        context=context,
        target_language=target_language,
        method=mode,
        calls=calls,
        retrieved_union=dedup_results(calls),
        output_rule=rule,
        token_usage=usage,
    )


def _execute_tool_call(
    tool_call, allowed, indexes, gateway, budget, calls, query_cache
) -> str:
    """Run one attempted tool call; returns the content fed back to the model.

    Well-formed search_rules calls are recorded as RetrievalCalls even when
    they fail (hidden space, exhausted result budget) so the trace shows
    every attempt; calls too malformed to carry a query are not.
    """
    if tool_call.name != TOOL_SCHEMA["name"]:
        return _tool_error(f"unknown tool {tool_call.name!r}")

    arguments = tool_call.arguments
    if isinstance(arguments, str):
        try:
            arguments = json.loads(arguments)
        except json.JSONDecodeError as exc:
            return _tool_error(f"arguments are not valid JSON: {exc}")
    if not isinstance(arguments, dict):
        return _tool_error("arguments must be an object")

    try:
        query = SearchQuery(
            query=arguments.get("query", ""),
            space=arguments.get("space", ""),
            k=int(arguments.get("k", 15)),
            language_filter=arguments.get("language"),
        )
    except (TypeError, ValueError) as exc:
        return _tool_error(f"invalid arguments: {exc}")

    iteration = len(calls) + 1
    if query.space not in allowed:
        calls.append(RetrievalCall(iteration=iteration, query=query, results=[]))
        return _tool_error(
            f"space {query.space!r} is not available; choose from {list(allowed)}"
        )

    union_size = len(dedup_results(calls))
    if union_size >= budget.max_total_results:
        calls.append(RetrievalCall(iteration=iteration, query=query, results=[]))
        return _tool_error(
            f"retrieval budget exhausted ({union_size} rules already retrieved)"
        )

    results = search(indexes, query, gateway, query_cache=query_cache)
    records = [r.to_record() for r in results]
    calls.append(RetrievalCall(iteration=iteration, query=query, results=records))
    return dumps(records)
