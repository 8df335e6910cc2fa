from unirule.kb.model import (
    INTENT,
    LOGIC,
    DIMENSIONS,
    SemanticDescription,
    SemanticIndex,
    SemanticIndexEntry,
    check_dimension,
)
from unirule.kb.translate import (
    parse_translation,
    translate_rule,
    translation_prompt,
    translation_prompt_version,
)
from unirule.kb.cache import TranslationCache, cache_key
from unirule.kb.index import (
    EMBED_FIELD,
    FORMAT_VERSION,
    build_index,
    load_index,
    normalize_vector,
    save_index,
)

__all__ = [
    "INTENT",
    "LOGIC",
    "DIMENSIONS",
    "SemanticDescription",
    "SemanticIndex",
    "SemanticIndexEntry",
    "check_dimension",
    "parse_translation",
    "translate_rule",
    "translation_prompt",
    "translation_prompt_version",
    "TranslationCache",
    "cache_key",
    "EMBED_FIELD",
    "FORMAT_VERSION",
    "build_index",
    "load_index",
    "normalize_vector",
    "save_index",
]
