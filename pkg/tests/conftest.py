import numpy as np
import pytest

from trait.corpus.model import build_corpus
from trait.graph.build import CorrespondenceGraph, PromotionTable
from trait.graph.embeddings import save_trem


def make_corpus(docs, min_freq=1):
    """docs: list of (doc_id, attribute, rating, [[token, ...], ...])."""
    return build_corpus(docs, min_freq=min_freq)


@pytest.fixture
def tiny_corpus():
    return make_corpus([
        ("d0", "city_a", 4, [["room", "clean", "great"], ["pool", "warm"]]),
        ("d1", "city_a", 2, [["room", "small", "bad"], ["staff", "slow"]]),
        ("d2", "city_b", 5, [["pool", "great", "clean"], ["staff", "nice"]]),
    ])


def random_tiny_corpus(rng, max_sentences=6, max_tokens=4, vocab=4, attrs=2):
    """Randomized miniature corpus for exact-oracle comparisons."""
    n_docs = int(rng.integers(2, 4))
    docs = []
    remaining = int(rng.integers(n_docs, max_sentences + 1))
    for k in range(n_docs):
        left_docs = n_docs - k - 1
        hi = remaining - left_docs
        m = int(rng.integers(1, hi + 1)) if k < n_docs - 1 else remaining
        remaining -= m
        sents = []
        for _ in range(m):
            n = int(rng.integers(1, max_tokens + 1))
            sents.append([f"w{int(v)}" for v in rng.integers(0, vocab, n)])
        docs.append((f"d{k}", f"attr{int(rng.integers(0, attrs))}", None, sents))
    return make_corpus(docs)


def random_graph(rng, corpus, edge_prob=0.5):
    """Random symmetric same-attribute graph over corpus sentences."""
    groups = {}
    for g, doc, _ in corpus.iter_sentences():
        groups.setdefault(doc.attribute_value, []).append(g)
    neighbors = {}
    for ids in groups.values():
        for x in range(len(ids)):
            for y in range(x + 1, len(ids)):
                if rng.random() < edge_prob:
                    neighbors.setdefault(ids[x], []).append(ids[y])
                    neighbors.setdefault(ids[y], []).append(ids[x])
    for v in neighbors.values():
        v.sort()
    return CorrespondenceGraph(neighbors, 0.0, corpus.n_sentences)


def random_promotion(rng, vocab_size, epsilon, max_related=2):
    """Random directional promotion table with uniform weight epsilon."""
    related = {}
    for v in range(vocab_size):
        others = [w for w in range(vocab_size) if w != v]
        k = int(rng.integers(0, min(max_related, len(others)) + 1))
        if k:
            picks = rng.choice(others, size=k, replace=False)
            related[v] = [(int(w), float(epsilon)) for w in sorted(picks)]
    return PromotionTable(related, epsilon, 0.0, max_related, vocab_size)


def promo_dict(promotion):
    """Oracle-side view of a promotion table (plain dict)."""
    if promotion is None:
        return {}
    return {v: list(pairs) for v, pairs in promotion.related.items()}


def write_trem(path, keys, vectors):
    save_trem(path, keys, np.asarray(vectors, dtype=np.float32))
    return path
