"""Prompt templates shipped as data files, addressed by short name.

Templates use string.Template placeholders so rule text containing braces
or dollar signs never breaks substitution. Each template carries a version
derived from its own content; caches key on it, so editing a template
automatically invalidates stale cached outputs.
"""

import hashlib
import string
from importlib import resources

_CACHE: dict = {}


def load_prompt(name: str) -> str:
    if name not in _CACHE:
        path = resources.files("unirule.prompts").joinpath(f"{name}.txt")
        _CACHE[name] = path.read_text(encoding="utf-8")
    return _CACHE[name]


def prompt_version(name: str) -> str:
    """12-hex-digit content hash of the named template."""
    text = load_prompt(name)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def render_prompt(name: str, **values) -> str:
    return string.Template(load_prompt(name)).safe_substitute(**values)
