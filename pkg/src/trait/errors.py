"""Exception types shared across the package."""


class TraitError(Exception):
    """Base class for every error this package raises on purpose."""


class CorpusFormatError(TraitError):
    """A corpus file violates the JSONL document schema."""


class EmbeddingFormatError(TraitError):
    """An embedding file violates the TREM binary layout."""


class GraphError(TraitError):
    """Correspondence graph or promotion table construction failed."""


class ConfigError(TraitError):
    """A run configuration violates a documented constraint."""


class ConsistencyError(TraitError):
    """Internal count tables disagree with the current assignments."""
