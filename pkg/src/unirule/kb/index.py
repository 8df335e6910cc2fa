"""Index construction and the versioned on-disk index format."""

import base64
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from unirule.corpus import DetectionRule
from unirule.errors import ChecksumMismatch, VersionMismatch
from unirule.kb.model import (
    SemanticDescription,
    SemanticIndex,
    SemanticIndexEntry,
    check_dimension,
)
from unirule.kb.translate import translate_rule

FORMAT_VERSION = 1
TRANSLATE_WORKERS = 8

# What gets embedded per entry. The translations carry both a summary and a
# full paragraph; the paragraph is the richer signal, so it is the default.
EMBED_FIELD = "full_text"


def normalize_vector(vector: np.ndarray) -> np.ndarray:
    """Unit-normalize in float64, then store as float32."""
    v = np.asarray(vector, dtype=np.float64)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot normalize a zero vector")
    return (v / norm).astype(np.float32)


def build_index(
    rules: list,
    dimension: str,
    gateway,
    cache=None,
    embed_field: str = EMBED_FIELD,
) -> SemanticIndex:
    """Translate then embed every rule; cached translations are not re-asked.

    Cache writes happen as each translation lands, so an interrupted build
    resumes where it stopped.
    """
    check_dimension(dimension)
    if not rules:
        raise ValueError("rules must be non-empty")
    if embed_field not in ("full_text", "summary"):
        raise ValueError(f"embed_field must be full_text or summary: {embed_field}")

    ordered = sorted(rules, key=lambda r: r.id)

    def describe(rule: DetectionRule):
        if cache is not None:
            hit = cache.get(rule, dimension)
            if hit is not None:
                return hit
        description = translate_rule(rule, dimension, gateway)
        if cache is not None:
            cache.put(rule, dimension, description)
        return description

    with ThreadPoolExecutor(max_workers=TRANSLATE_WORKERS) as pool:
        descriptions = list(pool.map(describe, ordered))

    texts = [getattr(d, embed_field) for d in descriptions]
    vectors = [normalize_vector(v) for v in gateway.embed(texts)]

    entries = [
        SemanticIndexEntry(
            vector=vector, rule=rule, language=rule.language, description=description
        )
        for rule, description, vector in zip(ordered, descriptions, vectors)
    ]
    return SemanticIndex(
        dimension=dimension, embed_dim=int(vectors[0].shape[0]), entries=entries
    )


def _entry_line(entry: SemanticIndexEntry) -> str:
    record = {
        "description": entry.description.to_record(),
        "rule": entry.rule.to_record(),
        "vector": base64.b64encode(
            entry.vector.astype("<f4").tobytes()
        ).decode("ascii"),
    }
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def save_index(index: SemanticIndex, path: str | Path) -> None:
    lines = [_entry_line(entry) for entry in index.entries]
    body = "".join(line + "\n" for line in lines)
    header = {
        "checksum": hashlib.sha256(body.encode("utf-8")).hexdigest(),
        "dimension": index.dimension,
        "embed_dim": index.embed_dim,
        "entries": len(index.entries),
        "format_version": FORMAT_VERSION,
    }
    header_line = json.dumps(header, sort_keys=True, separators=(",", ":"))
    Path(path).write_text(header_line + "\n" + body, encoding="utf-8")


def load_index(path: str | Path) -> SemanticIndex:
    text = Path(path).read_text(encoding="utf-8")
    newline = text.find("\n")
    if newline < 0:
        raise ChecksumMismatch(f"index file has no body: {path}")
    header = json.loads(text[:newline])
    body = text[newline + 1 :]

    if header.get("format_version") != FORMAT_VERSION:
        raise VersionMismatch(
            f"index format {header.get('format_version')!r}, "
            f"this build reads {FORMAT_VERSION}"
        )
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != header["checksum"]:
        raise ChecksumMismatch(f"index body does not match its checksum: {path}")

    entries = []
    for line in body.splitlines():
        record = json.loads(line)
        vector = np.frombuffer(base64.b64decode(record["vector"]), dtype="<f4")
        entries.append(
            SemanticIndexEntry(
                vector=vector,
                rule=DetectionRule.from_record(record["rule"]),
                language=record["rule"]["language"],
                description=SemanticDescription.from_record(record["description"]),
            )
        )
    if len(entries) != header["entries"]:
        raise ChecksumMismatch(
            f"header claims {header['entries']} entries, body has {len(entries)}"
        )
    return SemanticIndex(
        dimension=header["dimension"], embed_dim=header["embed_dim"], entries=entries
    )
