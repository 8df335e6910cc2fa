"""Rule-to-description translation along the intent and logic dimensions."""

import re

from unirule.corpus import DetectionRule
from unirule.errors import EmptyTranslation
from unirule.gateway import ChatMessage
from unirule.kb.model import SemanticDescription, check_dimension
from unirule.prompts import prompt_version, render_prompt

LABELS = {"intent": "INTENT", "logic": "LOGIC"}


def translation_prompt(rule: DetectionRule, dimension: str) -> str:
    check_dimension(dimension)
    return render_prompt(
        f"translate_{dimension}",
        language=rule.language,
        title=rule.title or "(untitled)",
        description=rule.description or "(none)",
        source_text=rule.source_text,
    )


def translation_prompt_version(dimension: str) -> str:
    return prompt_version(f"translate_{check_dimension(dimension)}")


def parse_translation(text: str, rule_id: str, dimension: str) -> SemanticDescription:
    """Split 'INTENT: X. DETAIL: Y' style output into summary and full text.

    Output that ignores the format is salvaged: first sentence becomes the
    summary, everything the full text. Only blank output is an error.
    """
    text = text.strip()
    if not text:
        raise EmptyTranslation(f"blank translation for rule {rule_id} ({dimension})")

    label = LABELS[dimension]
    match = re.search(
        rf"{label}:\s*(?P<summary>.*?)\s*DETAIL:\s*(?P<detail>.+)", text, re.DOTALL
    )
    if match:
        summary = match.group("summary").strip().rstrip(".")
        detail = match.group("detail").strip()
        if summary and detail:
            return SemanticDescription(
                rule_id=rule_id, dimension=dimension, summary=summary, full_text=detail
            )

    first_sentence = re.split(r"(?<=[.!?])\s", text, maxsplit=1)[0]
    return SemanticDescription(
        rule_id=rule_id,
        dimension=dimension,
        summary=first_sentence.strip().rstrip("."),
        full_text=text,
    )


def translate_rule(rule: DetectionRule, dimension: str, gateway) -> SemanticDescription:
    """Ask the model for the rule's semantics; one re-ask on blank output."""
    prompt = translation_prompt(rule, dimension)
    messages = [ChatMessage(role="user", content=prompt)]
    for _ in range(2):
        reply = gateway.chat(messages)
        if reply.content.strip():
            return parse_translation(reply.content, rule.id, dimension)
    raise EmptyTranslation(f"blank translation for rule {rule.id} ({dimension})")
