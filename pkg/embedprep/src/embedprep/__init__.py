"""Embedding preparation for the trait engine.

Reads the engine's corpus JSONL format, encodes sentences or vocabulary
terms with a pluggable encoder, and writes TREM embedding files the
engine consumes, so the engine itself never touches a neural runtime.
"""

__version__ = "0.1.0"

from embedprep.encoders import HashingEncoder, get_encoder
from embedprep.job import EmbeddingJob, embed_sentences, embed_words
from embedprep.trem import write_trem

__all__ = [
    "EmbeddingJob",
    "HashingEncoder",
    "embed_sentences",
    "embed_words",
    "get_encoder",
    "write_trem",
    "__version__",
]
