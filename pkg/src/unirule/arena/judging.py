"""Pairwise judging protocol: anonymized candidates, randomized order.

A judgment shows the judge the threat context, the ground-truth rule, and
two candidate rules labeled only FIRST and SECOND. Which candidate goes
first is decided by a per-judgment seed, and the presented order is kept on
the record so position bias stays auditable after the fact.
"""

import hashlib
import itertools
import random
import re
import time
from dataclasses import dataclass

from unirule.errors import TooFewMethods, UnparseableVerdict
from unirule.gateway.model import ChatMessage
from unirule.jsonl import read_jsonl, write_jsonl
from unirule.prompts import render_prompt

OUTCOMES = ("a", "b", "tie")
ORDERS = ("ab", "ba")

VERDICT_WORDS = {"FIRST": "first", "SECOND": "second", "TIE": "tie"}
REPROMPT = "Answer with exactly one word: FIRST, SECOND, or TIE."


@dataclass(frozen=True)
class Candidate:
    """A generated rule entering the arena under its method's name."""

    method: str
    text: str

    def __post_init__(self):
        if not self.method:
            raise ValueError("candidate method name must be non-empty")
        if not self.text:
            raise ValueError("candidate rule text must be non-empty")


@dataclass
class PairwiseJudgment:
    scenario: tuple  # (language, context_type)
    instance_id: str
    method_a: str
    method_b: str
    presented_order: str  # "ab" = a shown first, "ba" = b shown first
    outcome: str  # "a", "b", or "tie"
    judge_id: str
    timestamp: float = 0.0

    def __post_init__(self):
        self.scenario = tuple(self.scenario)
        if len(self.scenario) != 2:
            raise ValueError("scenario must be a (language, context_type) pair")
        if self.method_a == self.method_b:
            raise ValueError("method_a and method_b must differ")
        if self.presented_order not in ORDERS:
            raise ValueError(f"presented_order must be one of {ORDERS}")
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}")

    def to_record(self) -> dict:
        return {
            "scenario": {
                "language": self.scenario[0],
                "context_type": self.scenario[1],
            },
            "instance_id": self.instance_id,
            "method_a": self.method_a,
            "method_b": self.method_b,
            "presented_order": self.presented_order,
            "outcome": self.outcome,
            "judge_id": self.judge_id,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_record(cls, record: dict) -> "PairwiseJudgment":
        scenario = record["scenario"]
        return cls(
            scenario=(scenario["language"], scenario["context_type"]),
            instance_id=record["instance_id"],
            method_a=record["method_a"],
            method_b=record["method_b"],
            presented_order=record["presented_order"],
            outcome=record["outcome"],
            judge_id=record["judge_id"],
            timestamp=record.get("timestamp", 0.0),
        )


def write_judgments(path, judgments) -> int:
    return write_jsonl(path, (j.to_record() for j in judgments))


def read_judgments(path) -> list:
    return [PairwiseJudgment.from_record(r) for r in read_jsonl(path)]


def enumerate_pairs(methods: list) -> list:
    """All C(M,2) unordered pairs, in the order the methods were given."""
    if len(methods) < 2:
        raise TooFewMethods(f"need at least 2 methods, got {len(methods)}")
    if len(set(methods)) != len(methods):
        raise ValueError(f"duplicate method names in {methods}")
    return list(itertools.combinations(methods, 2))


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from string parts, for per-judgment order flips."""
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def parse_verdict(reply: str) -> str | None:
    """Extract the verdict word, tolerant of surrounding prose.

    Accepts iff exactly one distinct verdict word appears; a reply naming
    two of them is ambiguous and rejected.
    """
    found = {
        VERDICT_WORDS[m.group(0).upper()]
        for m in re.finditer(r"\b(first|second|tie)\b", reply, re.IGNORECASE)
    }
    if len(found) == 1:
        return found.pop()
    return None


def judge_pair(
    context,
    rule_a: Candidate,
    rule_b: Candidate,
    gateway,
    seed: int,
    *,
    language: str,
    reference_text: str,
    instance_id: str | None = None,
    judge_id: str = "unspecified",
    clock=time.time,
) -> PairwiseJudgment:
    """Run one anonymized comparison and unscramble the verdict.

    context is either a plain string or an object with .text, .type and
    .rule_id (the latter two supply the scenario slot and instance id when
    not given explicitly).
    """
    context_text = getattr(context, "text", context)
    context_type = getattr(context, "type", "context")
    if instance_id is None:
        instance_id = getattr(context, "rule_id", "unknown")
    if not rule_a.text or not rule_b.text:
        raise ValueError("both candidate rules must be non-empty")

    rng = random.Random(seed)
    order = "ba" if rng.random() < 0.5 else "ab"
    first, second = (rule_a, rule_b) if order == "ab" else (rule_b, rule_a)

    prompt = render_prompt(
        "judge",
        language=language,
        context=context_text,
        reference=reference_text,
        first=first.text,
        second=second.text,
    )
    messages = [ChatMessage(role="user", content=prompt)]
    reply = gateway.chat(messages)
    verdict = parse_verdict(reply.content or "")
    if verdict is None:
        messages.append(reply)
        messages.append(ChatMessage(role="user", content=REPROMPT))
        reply = gateway.chat(messages)
        verdict = parse_verdict(reply.content or "")
        if verdict is None:
            raise UnparseableVerdict(
                f"no verdict in judge reply after reprompt: {reply.content!r}"
            )

    if verdict == "tie":
        outcome = "tie"
    elif verdict == "first":
        outcome = "a" if order == "ab" else "b"
    else:
        outcome = "b" if order == "ab" else "a"

    return PairwiseJudgment(
        scenario=(language, context_type),
        instance_id=instance_id,
        method_a=rule_a.method,
        method_b=rule_b.method,
        presented_order=order,
        outcome=outcome,
        judge_id=judge_id,
        timestamp=clock(),
    )


def first_position_win_fraction(judgments) -> float | None:
    """Fraction of decisive judgments won by the first-presented candidate.

    None when every judgment is a tie (no decisive evidence either way).
    """
    decisive = 0
    first_wins = 0
    for j in judgments:
        if j.outcome == "tie":
            continue
        decisive += 1
        if (j.outcome == "a") == (j.presented_order == "ab"):
            first_wins += 1
    if decisive == 0:
        return None
    return first_wins / decisive
