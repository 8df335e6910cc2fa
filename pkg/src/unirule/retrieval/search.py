"""Exact top-k semantic search over the dual indexes.

Exhaustive scan, not ANN: corpora stay small enough that exactness is free,
and exactness is what makes the retrieval layer testable against a
brute-force oracle.
"""

from dataclasses import dataclass

import numpy as np

from unirule.kb import SemanticIndex


@dataclass
class SearchQuery:
    query: str
    space: str
    k: int = 15
    language_filter: str | None = None

    def __post_init__(self):
        if not self.query or not self.query.strip():
            raise ValueError("query must be non-empty")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.space:
            raise ValueError("space must be non-empty")

    def to_record(self) -> dict:
        return {
            "query": self.query,
            "space": self.space,
            "k": self.k,
            "language_filter": self.language_filter,
        }


@dataclass
class SearchResult:
    rule: "object"
    language: str
    description: "object"
    score: float

    def to_record(self) -> dict:
        return {
            "rule_id": self.rule.id,
            "language": self.language,
            "score": round(self.score, 6),
            "description_summary": self.description.summary if self.description else "",
            "rule_source_text": self.rule.source_text,
        }


def search(
    indexes: dict, query: SearchQuery, gateway, query_cache: dict | None = None
) -> list:
    """Embed the query once, score every surviving entry, return exact top-k.

    Results are sorted by score descending with ties broken by rule_id
    ascending, so identical inputs always produce the identical list. An
    empty candidate set yields an empty list, not an error.
    """
    if query.space not in indexes:
        raise ValueError(
            f"unknown search space {query.space!r}; have {sorted(indexes)}"
        )
    index: SemanticIndex = indexes[query.space]

    if query_cache is not None and query.query in query_cache:
        query_vector = query_cache[query.query]
    else:
        raw = gateway.embed([query.query])[0]
        query_vector = np.asarray(raw, dtype=np.float64)
        query_vector /= np.linalg.norm(query_vector)
        if query_cache is not None:
            query_cache[query.query] = query_vector

    candidates = [
        entry
        for entry in index.entries
        if query.language_filter is None or entry.language == query.language_filter
    ]
    if not candidates:
        return []

    # multiply+sum rather than gemv: BLAS may give bitwise-identical rows
    # different last-ulp scores, which would break deterministic tie order
    matrix = np.stack([entry.vector for entry in candidates]).astype(np.float64)
    scores = (matrix * query_vector).sum(axis=1)

    order = sorted(
        range(len(candidates)), key=lambda i: (-scores[i], candidates[i].rule.id)
    )
    return [
        SearchResult(
            rule=candidates[i].rule,
            language=candidates[i].language,
            description=candidates[i].description,
            score=float(scores[i]),
        )
        for i in order[: query.k]
    ]
