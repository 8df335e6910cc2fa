import pathlib

import pytest

from unirule.corpus import DetectionRule
from unirule.gateway import mock_embed
from unirule.kb import (
    SemanticDescription,
    SemanticIndex,
    SemanticIndexEntry,
    normalize_vector,
)

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


def make_entry(
    rule_id: str,
    text: str,
    language: str = "snort",
    dimension: str = "intent",
    source_text: str = "",
) -> SemanticIndexEntry:
    """Index entry with a mock embedding of `text`, no gateway involved."""
    rule = DetectionRule(
        id=rule_id, language=language, source_text=source_text or f"source {rule_id}"
    )
    description = SemanticDescription(
        rule_id=rule_id, dimension=dimension, summary=f"summary {rule_id}", full_text=text
    )
    return SemanticIndexEntry(
        vector=normalize_vector(mock_embed(text)),
        rule=rule,
        language=language,
        description=description,
    )


def make_index(entries: list, dimension: str = "intent") -> SemanticIndex:
    entries = sorted(entries, key=lambda e: e.rule.id)
    return SemanticIndex(
        dimension=dimension, embed_dim=int(entries[0].vector.shape[0]), entries=entries
    )
