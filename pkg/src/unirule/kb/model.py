"""Dual-space knowledge base types: descriptions, entries, indexes."""

from dataclasses import dataclass, field

import numpy as np

from unirule.corpus import DetectionRule

INTENT = "intent"
LOGIC = "logic"
DIMENSIONS = (INTENT, LOGIC)

NORM_TOLERANCE = 1e-6


def check_dimension(dimension: str) -> str:
    if dimension not in DIMENSIONS:
        raise ValueError(f"dimension must be one of {DIMENSIONS}, got {dimension!r}")
    return dimension


@dataclass
class SemanticDescription:
    """One rule's translated semantics along a single dimension."""

    rule_id: str
    dimension: str
    summary: str
    full_text: str

    def __post_init__(self):
        check_dimension(self.dimension)
        if not self.full_text.strip():
            raise ValueError("full_text must be non-empty")

    def to_record(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "dimension": self.dimension,
            "summary": self.summary,
            "full_text": self.full_text,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SemanticDescription":
        return cls(
            rule_id=record["rule_id"],
            dimension=record["dimension"],
            summary=record["summary"],
            full_text=record["full_text"],
        )


@dataclass
class SemanticIndexEntry:
    vector: np.ndarray  # unit-normalized, float32
    rule: DetectionRule
    language: str
    description: SemanticDescription

    def __post_init__(self):
        norm = float(np.linalg.norm(self.vector.astype(np.float64)))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"entry vector is not unit length: {norm}")


@dataclass
class SemanticIndex:
    """Immutable, exhaustively scannable vector index for one dimension."""

    dimension: str
    embed_dim: int
    entries: list = field(default_factory=list)

    def __post_init__(self):
        ids = [entry.rule.id for entry in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("entry rule_ids must be unique within an index")
        for entry in self.entries:
            if entry.vector.shape != (self.embed_dim,):
                raise ValueError(
                    f"entry vector has shape {entry.vector.shape}, "
                    f"index dimension is {self.embed_dim}"
                )

    def __len__(self) -> int:
        return len(self.entries)
