from trait.graph.build import (
    CorrespondenceGraph,
    PromotionTable,
    build_correspondence_graph,
    build_promotion_table,
    cosine_similarity,
    empty_graph,
    empty_promotion,
    load_graph,
    save_graph,
)
from trait.graph.embeddings import EmbeddingTable, load_trem, save_trem

__all__ = [
    "CorrespondenceGraph",
    "PromotionTable",
    "build_correspondence_graph",
    "build_promotion_table",
    "cosine_similarity",
    "empty_graph",
    "empty_promotion",
    "load_graph",
    "save_graph",
    "EmbeddingTable",
    "load_trem",
    "save_trem",
]
