from unirule.corpus.model import (
    SPLUNK,
    ELASTIC,
    SNORT,
    KNOWN_LANGUAGES,
    DetectionRule,
    CorpusSplit,
    normalize_language,
)
from unirule.corpus.splunk import parse_splunk
from unirule.corpus.elastic import parse_elastic
from unirule.corpus.snort import parse_snort, format_snort
from unirule.corpus.load import (
    LoadReport,
    load_corpus,
    split_corpus,
    read_corpus_file,
    write_corpus_file,
)

__all__ = [
    "SPLUNK",
    "ELASTIC",
    "SNORT",
    "KNOWN_LANGUAGES",
    "DetectionRule",
    "CorpusSplit",
    "normalize_language",
    "parse_splunk",
    "parse_elastic",
    "parse_snort",
    "format_snort",
    "LoadReport",
    "load_corpus",
    "split_corpus",
    "read_corpus_file",
    "write_corpus_file",
]
