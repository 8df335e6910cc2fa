"""Corpus ingestion: walk directory trees, parse, split, persist.

Parse failures never abort ingestion; they are collected in a LoadReport.
Output ordering is always sorted by rule id so runs are reproducible.
"""

import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from unirule import jsonl
from unirule.corpus.elastic import parse_elastic
from unirule.corpus.model import ELASTIC, SNORT, SPLUNK, CorpusSplit, DetectionRule, normalize_language
from unirule.corpus.snort import parse_snort
from unirule.corpus.splunk import parse_splunk
from unirule.errors import InvalidRatio, UniruleError

SUFFIXES = {
    SPLUNK: (".yml", ".yaml"),
    ELASTIC: (".toml",),
    SNORT: (".rules",),
}


@dataclass
class LoadReport:
    """Ingestion outcome: parsed rules plus per-source failure notes."""

    rules: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # (source, message) pairs

    def add_failure(self, source: str, exc: Exception) -> None:
        self.failures.append((source, f"{type(exc).__name__}: {exc}"))


def _parse_file(path: Path, language: str, report: LoadReport) -> None:
    text = path.read_text(encoding="utf-8")
    if language == SNORT:
        for lineno, line in enumerate(text.splitlines(), start=1):
            try:
                rule = parse_snort(line)
            except UniruleError as exc:
                report.add_failure(f"{path}:{lineno}", exc)
                continue
            if rule is not None:
                report.rules.append(rule)
    else:
        parser = parse_splunk if language == SPLUNK else parse_elastic
        try:
            report.rules.append(parser(text))
        except UniruleError as exc:
            report.add_failure(str(path), exc)


def load_corpus(root: str | Path, language: str) -> LoadReport:
    """Parse every rule file under root for the given language.

    Returns all successfully parsed rules sorted by id; per-file parse
    failures are reported, not fatal. Raises OSError only when root itself
    is unreadable.
    """
    language = normalize_language(language)
    root = Path(root)
    if not root.is_dir():
        raise OSError(f"corpus root is not a readable directory: {root}")

    suffixes = SUFFIXES.get(language, (".yml", ".yaml", ".toml", ".rules", ".txt"))
    report = LoadReport()
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.suffix.lower() in suffixes:
            try:
                _parse_file(path, language, report)
            except (OSError, UnicodeDecodeError) as exc:
                report.add_failure(str(path), exc)
    report.rules.sort(key=lambda r: r.id)
    return report


def split_corpus(rules: list, ratio: float, seed: int) -> CorpusSplit:
    """Seeded shuffle then prefix split; |train| = floor(ratio * N + 0.5).

    Same (rules, seed, ratio) always produces the identical partition: the
    input is canonicalized by id before shuffling, so list order on entry
    does not matter.
    """
    if not 0 < ratio < 1:
        raise InvalidRatio(f"ratio must be in (0, 1), got {ratio}")
    if not rules:
        raise InvalidRatio("cannot split an empty corpus")

    ordered = sorted(rules, key=lambda r: r.id)
    rng = random.Random(seed)
    rng.shuffle(ordered)
    n_train = int(math.floor(ratio * len(ordered) + 0.5))
    return CorpusSplit(
        train=ordered[:n_train],
        test=ordered[n_train:],
        seed=seed,
        ratio=ratio,
    )


def write_corpus_file(path: str | Path, rules: list) -> int:
    """Corpus file: one JSON object per line, UTF-8, sorted by id."""
    records = [r.to_record() for r in sorted(rules, key=lambda r: r.id)]
    return jsonl.write_jsonl(path, records)


def read_corpus_file(path: str | Path) -> list:
    return [DetectionRule.from_record(rec) for rec in jsonl.read_jsonl(path)]
