from trait.corpus.model import (
    Corpus,
    Document,
    Sentence,
    Token,
    Vocabulary,
    build_corpus,
    load_corpus,
    partition_by_attribute,
)
from trait.corpus.normalize import (
    DEFAULT_NEGATORS,
    DEFAULT_STOP_WORDS,
    NormalizationConfig,
    normalize_text,
)
from trait.corpus.porter import stem

__all__ = [
    "Corpus",
    "Document",
    "Sentence",
    "Token",
    "Vocabulary",
    "build_corpus",
    "load_corpus",
    "partition_by_attribute",
    "DEFAULT_NEGATORS",
    "DEFAULT_STOP_WORDS",
    "NormalizationConfig",
    "normalize_text",
    "stem",
]
