"""Per-rule translation cache.

Keys combine the rule's content hash, the dimension, and the prompt version,
so edited rules or edited prompts re-translate while everything else is
reused across runs.
"""

import hashlib
import json
from pathlib import Path

from unirule.corpus import DetectionRule
from unirule.kb.model import SemanticDescription
from unirule.kb.translate import translation_prompt_version


def cache_key(rule: DetectionRule, dimension: str) -> str:
    content = hashlib.sha256(rule.source_text.encode("utf-8")).hexdigest()
    version = translation_prompt_version(dimension)
    return hashlib.sha256(f"{content}:{dimension}:{version}".encode()).hexdigest()[:32]


class TranslationCache:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def _path(self, rule: DetectionRule, dimension: str) -> Path:
        return self.root / f"{cache_key(rule, dimension)}.json"

    def get(self, rule: DetectionRule, dimension: str) -> SemanticDescription | None:
        path = self._path(rule, dimension)
        if not path.exists():
            self.misses += 1
            return None
        self.hits += 1
        return SemanticDescription.from_record(
            json.loads(path.read_text(encoding="utf-8"))
        )

    def put(
        self, rule: DetectionRule, dimension: str, description: SemanticDescription
    ) -> None:
        path = self._path(rule, dimension)
        path.write_text(
            json.dumps(description.to_record(), ensure_ascii=False, sort_keys=True),
            encoding="utf-8",
        )
