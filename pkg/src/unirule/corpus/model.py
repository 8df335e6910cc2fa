"""Core corpus types: rule languages, parsed rules, train/test splits."""

import hashlib
from dataclasses import dataclass, field

# Built-in language identifiers. Any other lowercase token without whitespace
# is accepted as an extension language.
SPLUNK = "splunk"
ELASTIC = "elastic"
SNORT = "snort"
KNOWN_LANGUAGES = (SPLUNK, ELASTIC, SNORT)


def normalize_language(language: str) -> str:
    """Case-normalize a language identifier, rejecting whitespace."""
    token = language.strip().lower()
    if not token or any(ch.isspace() for ch in token):
        raise ValueError(f"invalid language identifier: {language!r}")
    return token


def content_id(source_text: str) -> str:
    """Stable fallback id for rules whose source provides none."""
    return hashlib.sha256(source_text.encode("utf-8")).hexdigest()[:16]


@dataclass
class DetectionRule:
    """One parsed detection rule, language-tagged, source text verbatim."""

    id: str
    language: str
    source_text: str
    title: str = ""
    description: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.source_text:
            raise ValueError("source_text must be non-empty")
        self.language = normalize_language(self.language)
        if not self.id:
            self.id = content_id(self.source_text)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "language": self.language,
            "source_text": self.source_text,
            "title": self.title,
            "description": self.description,
            "extra": self.extra,
        }

    @classmethod
    def from_record(cls, record: dict) -> "DetectionRule":
        return cls(
            id=record["id"],
            language=record["language"],
            source_text=record["source_text"],
            title=record.get("title", ""),
            description=record.get("description", ""),
            extra=record.get("extra", {}),
        )


@dataclass
class CorpusSplit:
    """Deterministic train/test partition of a corpus."""

    train: list
    test: list
    seed: int
    ratio: float
