"""Parser for Splunk security-content style YAML detections."""

import yaml

from unirule.corpus.model import SPLUNK, DetectionRule
from unirule.errors import MalformedDocument, MissingQuery


def parse_splunk(document: str) -> DetectionRule:
    """Parse one security-content YAML document into a DetectionRule.

    The detection body is the `search` field (``query`` accepted as an
    alias); `name` and `description` map to title/description. Remaining
    scalar-ish metadata is kept in `extra` as strings.
    """
    try:
        data = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise MalformedDocument(f"unparseable YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedDocument("YAML document is not a mapping")

    search = data.get("search") or data.get("query")
    if not isinstance(search, str) or not search.strip():
        raise MissingQuery("no search/query field in document")

    extra = {}
    for key, value in data.items():
        if key in ("search", "query", "name", "description", "id"):
            continue
        if isinstance(value, (str, int, float, bool)):
            extra[key] = str(value)
        elif isinstance(value, list) and all(isinstance(v, (str, int, float)) for v in value):
            extra[key] = [str(v) for v in value]

    return DetectionRule(
        id=str(data.get("id", "")),
        language=SPLUNK,
        source_text=search.strip(),
        title=str(data.get("name", "") or ""),
        description=str(data.get("description", "") or ""),
        extra=extra,
    )
