"""JSONL file helpers.

All pipeline files are UTF-8, one JSON object per line, keys sorted so that
identical inputs produce byte-identical files.
"""

import json
from pathlib import Path
from typing import Any, Iterable, Iterator


def dumps(record: Any) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_jsonl(path: str | Path, records: Iterable[Any]) -> int:
    """Write records to path, one per line. Returns the record count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dumps(record))
            fh.write("\n")
            n += 1
    return n


def append_jsonl(path: str | Path, record: Any) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(dumps(record))
        fh.write("\n")


def read_jsonl(path: str | Path) -> Iterator[Any]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
