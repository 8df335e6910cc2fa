"""Evaluation context factory: four input contexts per test rule.

Each test rule can be evaluated from four starting points of decreasing
structure: its native description (context), a synthesized intelligence
snippet (cti), and the stored intent / logic translations. The cti variant
is the only one that costs an LLM call, and it passes a leak filter so the
snippet cannot smuggle the answer to the generator.
"""

import itertools
import random
from dataclasses import dataclass

from unirule.corpus.model import KNOWN_LANGUAGES
from unirule.errors import (
    CtiLeakError,
    InsufficientTestRules,
    MissingDescription,
    ProviderError,
)
from unirule.gateway.model import ChatMessage
from unirule.jsonl import read_jsonl, write_jsonl
from unirule.prompts import render_prompt

CONTEXT_TYPES = ("context", "cti", "intent", "logic")
PROVENANCES = ("native", "synthesized", "translated")

# A context type pins its provenance; cti is the only synthesized one.
PROVENANCE_OF = {
    "context": "native",
    "cti": "synthesized",
    "intent": "translated",
    "logic": "translated",
}

LEAK_SUBSTRING_LENGTH = 40
CTI_REGENERATION_PROMPT = (
    "Your report quotes the rule source text. Rewrite the report so no "
    "fragment of the rule text appears verbatim; paraphrase everything."
)


@dataclass
class ContextSpec:
    """One input context c, tagged with where its text came from.

    language and seed are carried for the contexts file; the type alone
    determines provenance.
    """

    rule_id: str
    type: str
    text: str
    provenance: str
    language: str = ""
    seed: int = 0

    def __post_init__(self):
        if self.type not in CONTEXT_TYPES:
            raise ValueError(f"type must be one of {CONTEXT_TYPES}, got {self.type!r}")
        if not self.text:
            raise ValueError("context text must be non-empty")
        if self.provenance != PROVENANCE_OF[self.type]:
            raise ValueError(
                f"type {self.type!r} requires provenance "
                f"{PROVENANCE_OF[self.type]!r}, got {self.provenance!r}"
            )

    def to_record(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "language": self.language,
            "context_type": self.type,
            "text": self.text,
            "provenance": self.provenance,
            "seed": self.seed,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ContextSpec":
        return cls(
            rule_id=record["rule_id"],
            type=record["context_type"],
            text=record["text"],
            provenance=record["provenance"],
            language=record.get("language", ""),
            seed=record.get("seed", 0),
        )


def write_contexts(path, specs) -> int:
    return write_jsonl(path, (s.to_record() for s in specs))


def read_contexts(path) -> list:
    return [ContextSpec.from_record(r) for r in read_jsonl(path)]


def shares_long_substring(a: str, b: str, length: int = LEAK_SUBSTRING_LENGTH) -> bool:
    """True when a and b share any common substring of at least `length`."""
    if len(a) < length or len(b) < length:
        return False
    grams = {b[i : i + length] for i in range(len(b) - length + 1)}
    return any(a[i : i + length] in grams for i in range(len(a) - length + 1))


def native_context(rule) -> ContextSpec:
    """The rule's own description field, verbatim."""
    if not rule.description:
        raise MissingDescription(f"rule {rule.id} has no native description")
    return ContextSpec(
        rule_id=rule.id,
        type="context",
        text=rule.description,
        provenance="native",
        language=rule.language,
    )


def translated_context(rule, description) -> ContextSpec:
    """An intent or logic translation, verbatim from the knowledge base."""
    if description.rule_id != rule.id:
        raise ValueError(
            f"description belongs to {description.rule_id}, not {rule.id}"
        )
    return ContextSpec(
        rule_id=rule.id,
        type=description.dimension,
        text=description.full_text,
        provenance="translated",
        language=rule.language,
    )


def synthesize_cti(rule, gateway) -> ContextSpec:
    """LLM-written intelligence snippet, filtered against answer leakage.

    A snippet sharing any >= 40-character substring with the rule source
    would hand the generator its answer; one paraphrase retry is allowed,
    then the rule is rejected.
    """
    prompt = render_prompt(
        "cti",
        title=rule.title or rule.id,
        description=rule.description or "(none)",
        source_text=rule.source_text,
    )
    messages = [ChatMessage(role="user", content=prompt)]
    for attempt in range(2):
        reply = gateway.chat(messages)
        text = (reply.content or "").strip()
        if not text:
            raise ProviderError(f"blank cti snippet for rule {rule.id}")
        if not shares_long_substring(text, rule.source_text):
            return ContextSpec(
                rule_id=rule.id,
                type="cti",
                text=text,
                provenance="synthesized",
                language=rule.language,
            )
        if attempt == 0:
            messages.append(reply)
            messages.append(ChatMessage(role="user", content=CTI_REGENERATION_PROMPT))
    raise CtiLeakError(
        f"cti snippet for rule {rule.id} still shares >= "
        f"{LEAK_SUBSTRING_LENGTH}-char substrings with the rule source"
    )


def make_contexts(rule, kb_descriptions, gateway) -> list:
    """All four context variants for one rule, in canonical type order.

    kb_descriptions is the (intent, logic) description pair stored for the
    rule. Raises MissingDescription when the rule has no native description
    (such rules simply do not participate in the context scenario).
    """
    by_dimension = {d.dimension: d for d in kb_descriptions}
    if set(by_dimension) != {"intent", "logic"}:
        raise ValueError(
            f"kb_descriptions must cover intent and logic, got {sorted(by_dimension)}"
        )
    return [
        native_context(rule),
        synthesize_cti(rule, gateway),
        translated_context(rule, by_dimension["intent"]),
        translated_context(rule, by_dimension["logic"]),
    ]


def scenario_grid(languages=KNOWN_LANGUAGES, context_types=CONTEXT_TYPES) -> list:
    """The exhaustive (language, context_type) grid, 3 x 4 by default."""
    return list(itertools.product(languages, context_types))


def sample_scenario_instances(
    test_set, context_type: str, n: int, seed: int, language: str | None = None
) -> list:
    """Seeded sample of n context instances for one scenario.

    test_set is a list of ContextSpec (a loaded contexts file); filtering
    by type and optional language happens here. Returns (spec, language)
    pairs, deterministically for a given seed, without duplicates.
    """
    if context_type not in CONTEXT_TYPES:
        raise ValueError(f"unknown context type {context_type!r}")
    if n < 0:
        raise ValueError("n must be >= 0")
    eligible = [
        s
        for s in test_set
        if s.type == context_type and (language is None or s.language == language)
    ]
    eligible.sort(key=lambda s: s.rule_id)
    if n > len(eligible):
        raise InsufficientTestRules(
            f"scenario ({language}, {context_type}) has {len(eligible)} eligible "
            f"rules, need {n}"
        )
    sampled = random.Random(seed).sample(eligible, n)
    return [(spec, spec.language) for spec in sampled]
