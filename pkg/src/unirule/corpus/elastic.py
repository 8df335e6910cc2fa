"""Parser for Elastic detection-rules style TOML files."""

import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from unirule.corpus.model import ELASTIC, DetectionRule
from unirule.errors import MalformedDocument, MissingQuery


def parse_elastic(document: str) -> DetectionRule:
    """Parse one detection-rules TOML document into a DetectionRule.

    The detection body is `rule.query`; top-level keys of the [rule] table
    land in `extra`. Files without a [rule] table are rejected.
    """
    try:
        data = tomllib.loads(document)
    except tomllib.TOMLDecodeError as exc:
        raise MalformedDocument(f"unparseable TOML: {exc}") from exc

    rule = data.get("rule")
    if not isinstance(rule, dict):
        raise MalformedDocument("no [rule] table in document")

    query = rule.get("query")
    if not isinstance(query, str) or not query.strip():
        raise MissingQuery("no rule.query field in document")

    extra = {}
    for key, value in rule.items():
        if key in ("query", "name", "description", "rule_id"):
            continue
        if isinstance(value, (str, int, float, bool)):
            extra[key] = str(value)
        elif isinstance(value, list) and all(isinstance(v, (str, int, float)) for v in value):
            extra[key] = [str(v) for v in value]

    return DetectionRule(
        id=str(rule.get("rule_id", "")),
        language=ELASTIC,
        source_text=query.strip(),
        title=str(rule.get("name", "") or ""),
        description=str(rule.get("description", "") or ""),
        extra=extra,
    )
