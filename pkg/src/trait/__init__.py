"""Attribute-conditioned aspect and sentiment discovery.

The engine ingests attribute-tagged review text, builds a sentence
correspondence graph from precomputed embeddings, runs a collapsed Gibbs
sampler regularized by that graph, and emits posterior estimates,
attribute profiles, coherence scores, and profile-similarity matrices.
"""

__version__ = "0.1.0"

from trait.errors import (
    ConfigError,
    ConsistencyError,
    CorpusFormatError,
    EmbeddingFormatError,
    GraphError,
    TraitError,
)

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "CorpusFormatError",
    "EmbeddingFormatError",
    "GraphError",
    "TraitError",
    "__version__",
]
