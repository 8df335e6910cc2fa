"""Parser for single-line Snort 2.x style rules.

Grammar handled here: `action proto src_addr src_port direction dst_addr
dst_port ( key:value; key; ... )`. Bracketed address/port lists count as one
header token. Option values may contain quoted semicolons and escaped
characters; repeated options (content, pcre, ...) are kept in order.
"""

from unirule.corpus.model import SNORT, DetectionRule
from unirule.errors import MalformedHeader, UnbalancedOptions

DIRECTIONS = ("->", "<>")

# Reserved extra key holding the full ordered [key, value] option sequence,
# so interleaved modifiers (content/nocase/content) survive reconstruction.
OPTION_SEQUENCE = "option_sequence"


def _header_tokens(header: str) -> list:
    """Tokenize a rule header, keeping [bracketed,lists] as one token."""
    tokens = []
    buf = []
    depth = 0
    for ch in header:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch.isspace() and depth == 0:
            if buf:
                tokens.append("".join(buf))
                buf = []
        else:
            buf.append(ch)
    if buf:
        tokens.append("".join(buf))
    return tokens


def _split_options(body: str) -> list:
    """Split the option body on semicolons, respecting quotes and escapes."""
    options = []
    buf = []
    in_quote = False
    escaped = False
    for ch in body:
        if escaped:
            buf.append(ch)
            escaped = False
            continue
        if ch == "\\":
            buf.append(ch)
            escaped = True
            continue
        if ch == '"':
            in_quote = not in_quote
            buf.append(ch)
            continue
        if ch == ";" and not in_quote:
            options.append("".join(buf).strip())
            buf = []
            continue
        buf.append(ch)
    if in_quote:
        raise UnbalancedOptions("unterminated quoted string in options")
    tail = "".join(buf).strip()
    if tail:
        raise UnbalancedOptions(f"option not terminated by ';': {tail!r}")
    return [opt for opt in options if opt]


def _unquote(value: str) -> str:
    """Strip one layer of surrounding double quotes, if present."""
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        return value[1:-1]
    return value


def parse_snort(line: str) -> DetectionRule | None:
    """Parse one Snort rule line. Returns None for blank/comment lines."""
    text = line.strip()
    if not text or text.startswith("#"):
        return None

    open_idx = text.find("(")
    if open_idx < 0 or not text.endswith(")"):
        raise UnbalancedOptions("rule has no parenthesized option block")
    header = text[:open_idx].strip()
    body = text[open_idx + 1 : -1]

    tokens = _header_tokens(header)
    if len(tokens) != 7:
        raise MalformedHeader(f"expected 7 header tokens, got {len(tokens)}: {header!r}")
    action, proto, src_addr, src_port, direction, dst_addr, dst_port = tokens
    if direction not in DIRECTIONS:
        raise MalformedHeader(f"bad direction token {direction!r}")

    sequence = []
    for opt in _split_options(body):
        key, sep, value = opt.partition(":")
        sequence.append([key.strip(), value.strip() if sep else ""])

    extra = {
        "action": action,
        "protocol": proto,
        "src_addr": src_addr,
        "src_port": src_port,
        "direction": direction,
        "dst_addr": dst_addr,
        "dst_port": dst_port,
        OPTION_SEQUENCE: sequence,
    }
    for key, raw in sequence:
        value = _unquote(raw)
        if key in extra and key != OPTION_SEQUENCE:
            # repeated option, or an option shadowing a header field:
            # keep every occurrence in order
            prior = extra[key]
            if isinstance(prior, list):
                prior.append(value)
            else:
                extra[key] = [prior, value]
        else:
            extra[key] = value

    sid = extra.get("sid", "")
    rule_id = f"snort-{sid}" if isinstance(sid, str) and sid else ""

    title = extra.get("msg", "")
    if isinstance(title, list):
        title = title[0]

    return DetectionRule(
        id=rule_id,
        language=SNORT,
        source_text=text,
        title=title,
        description=title,
        extra=extra,
    )


def format_snort(rule: DetectionRule) -> str:
    """Rebuild the rule line from parsed fields (round-trip check)."""
    extra = rule.extra
    header = " ".join(
        extra[k] if isinstance(extra[k], str) else extra[k][0]
        for k in ("action", "protocol", "src_addr", "src_port",
                  "direction", "dst_addr", "dst_port")
    )
    parts = []
    for key, value in extra.get(OPTION_SEQUENCE, []):
        parts.append(f"{key}:{value};" if value else f"{key};")
    return f"{header} ({' '.join(parts)})"
