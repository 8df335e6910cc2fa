"""The four reference generators the agent is compared against.

baseline writes from the context alone; random_rag and std_rag inject a
fixed 15-rule reference set (uniform vs. cosine over raw source text);
human_authored replays the ground-truth rule byte for byte. The reference
count matches the agent's typical retrieval volume so no method wins by
simply seeing more examples.
"""

import random
from dataclasses import dataclass

import numpy as np

from unirule.errors import MalformedOutput
from unirule.gateway.model import ChatMessage
from unirule.generation.agent import (
    FENCE_REPROMPT,
    context_prompt,
    extract_rule_block,
    new_usage,
    tracked_chat,
)
from unirule.generation.traces import GenerationTrace, RetrievalCall, dedup_results
from unirule.prompts import render_prompt
from unirule.retrieval.search import SearchQuery

REFERENCE_COUNT = 15
REFERENCE_TRUNCATION = 2000  # chars of source text shown per reference

BASELINE_MODES = ("baseline", "random_rag", "std_rag", "human_authored")


@dataclass
class RawIndex:
    """Raw source-text embeddings for std_rag, unit rows in float32."""

    rules: list
    matrix: np.ndarray

    def __post_init__(self):
        if len(self.rules) != self.matrix.shape[0]:
            raise ValueError("one matrix row per rule required")


def build_raw_index(rules, gateway) -> RawIndex:
    """Embed each rule's raw source text, sorted by id for determinism."""
    ordered = sorted(rules, key=lambda r: r.id)
    if not ordered:
        raise ValueError("cannot build a raw index from zero rules")
    vectors = gateway.embed([r.source_text for r in ordered])
    matrix = np.zeros((len(ordered), len(vectors[0])), dtype=np.float32)
    for i, vector in enumerate(vectors):
        v = np.asarray(vector, dtype=np.float64)
        matrix[i] = (v / np.linalg.norm(v)).astype(np.float32)
    return RawIndex(rules=ordered, matrix=matrix)


def raw_top_k(raw_index: RawIndex, context_text: str, gateway, k: int) -> list:
    """Exact top-k cosine over raw-text embeddings, ties by rule id."""
    raw = gateway.embed([context_text])[0]
    query = np.asarray(raw, dtype=np.float64)
    query /= np.linalg.norm(query)
    # Row-wise multiply-and-sum keeps scores a pure function of row content.
    scores = (raw_index.matrix.astype(np.float64) * query).sum(axis=1)
    order = sorted(
        range(len(raw_index.rules)),
        key=lambda i: (-scores[i], raw_index.rules[i].id),
    )
    return [(float(scores[i]), raw_index.rules[i]) for i in order[: min(k, len(order))]]


def reference_record(rule, score: float = 0.0) -> dict:
    return {
        "rule_id": rule.id,
        "language": rule.language,
        "score": round(score, 6),
        "description_summary": rule.title,
        "rule_source_text": rule.source_text,
    }


def format_references(records, truncation: int = REFERENCE_TRUNCATION) -> str:
    """Reference block appended to the user prompt: summary plus source."""
    parts = ["REFERENCE RULES:"]
    for i, record in enumerate(records, start=1):
        source = record["rule_source_text"]
        if len(source) > truncation:
            source = source[:truncation] + "\n[truncated]"
        summary = record["description_summary"] or record["rule_id"]
        parts.append(f"[{i}] {summary}\n{source}")
    return "\n\n".join(parts)


def complete_rule(context, target_language, gateway, usage, references=None) -> str:
    """One-shot generation with a single corrective reprompt on bad fencing."""
    user = context_prompt(context)
    if references:
        user = f"{user}\n\n{format_references(references)}"
    messages = [
        ChatMessage(
            role="system",
            content=render_prompt("generate_system", language=target_language),
        ),
        ChatMessage(role="user", content=user),
    ]
    reply = tracked_chat(gateway, messages, usage)
    rule = extract_rule_block(reply.content)
    if rule is None:
        messages.append(reply)
        messages.append(ChatMessage(role="user", content=FENCE_REPROMPT))
        reply = tracked_chat(gateway, messages, usage)
        rule = extract_rule_block(reply.content)
        if rule is None:
            raise MalformedOutput(
                f"no single fenced rule block after reprompt: {reply.content!r}"
            )
    return rule


def generate_baseline(
    context,
    target_language: str,
    mode: str,
    gateway,
    train_rules=None,
    raw_index: RawIndex | None = None,
    reference_rule=None,
    seed: int = 0,
) -> GenerationTrace:
    """Run one baseline generator; resources depend on the mode.

    random_rag and std_rag need train_rules / raw_index respectively and
    record their single reference injection as a pseudo retrieval call
    (spaces "random" and "raw") so traces stay audit-comparable.
    """
    if mode not in BASELINE_MODES:
        raise ValueError(f"mode must be one of {BASELINE_MODES}, got {mode!r}")

    if mode == "human_authored":
        if reference_rule is None:
            raise ValueError("human_authored needs the ground-truth rule")
        return GenerationTrace(
            context=context,
            target_language=target_language,
            method=mode,
            output_rule=reference_rule.source_text,
            token_usage=new_usage(),
        )

    usage = new_usage()

    if mode == "baseline":
        rule = complete_rule(context, target_language, gateway, usage)
        return GenerationTrace(
            context=context,
            target_language=target_language,
            method=mode,
            output_rule=rule,
            token_usage=usage,
        )

    if mode == "random_rag":
        if not train_rules:
            raise ValueError("random_rag needs the train rule collection")
        ordered = sorted(train_rules, key=lambda r: r.id)
        n = min(REFERENCE_COUNT, len(ordered))
        sampled = random.Random(seed).sample(ordered, n)
        records = [reference_record(r) for r in sampled]
        space = "random"
    else:  # std_rag
        if raw_index is None:
            raise ValueError("std_rag needs the raw source-text index")
        scored = raw_top_k(raw_index, context.text, gateway, REFERENCE_COUNT)
        records = [reference_record(r, score) for score, r in scored]
        space = "raw"

    call = RetrievalCall(
        iteration=1,
        query=SearchQuery(query=context.text, space=space, k=REFERENCE_COUNT),
        results=records,
    )
    rule = complete_rule(context, target_language, gateway, usage, references=records)
    return GenerationTrace(
        context=context,
        target_language=target_language,
        method=mode,
        calls=[call],
        retrieved_union=dedup_results([call]),
        output_rule=rule,
        token_usage=usage,
    )
