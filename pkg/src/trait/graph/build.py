"""Correspondence graph and word-promotion table construction.

The correspondence graph connects same-attribute sentence pairs whose
embedding cosine similarity strictly exceeds a threshold rho; it is the
edge structure the sampler's regularization term reads. The promotion
table maps each word to its most similar words (cosine at or above a
separate threshold), each carrying the urn promotion weight epsilon.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from trait.errors import EmbeddingFormatError, GraphError

_BLOCK = 512


def cosine_similarity(u, v) -> float:
    """u.v / (|u||v|), accumulated in double precision."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise GraphError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise GraphError("cosine similarity of a zero-norm vector is undefined")
    return float(np.dot(u, v) / (nu * nv))


@dataclass
class CorrespondenceGraph:
    neighbors: dict  # sentence index -> sorted list of sentence indices
    rho: float
    n_sentences: int

    @property
    def n_edges(self):
        return sum(len(v) for v in self.neighbors.values()) // 2

    def neighbors_of(self, i):
        return self.neighbors.get(i, [])

    def degree(self, i):
        return len(self.neighbors.get(i, ()))

    def to_csr(self):
        ptr = np.zeros(self.n_sentences + 1, dtype=np.int64)
        for i in range(self.n_sentences):
            ptr[i + 1] = ptr[i] + len(self.neighbors.get(i, ()))
        ids = np.empty(ptr[-1], dtype=np.int64)
        for i in range(self.n_sentences):
            nbrs = self.neighbors.get(i, ())
            ids[ptr[i] : ptr[i] + len(nbrs)] = nbrs
        return ids, ptr


def empty_graph(n_sentences: int, rho: float = 0.0) -> CorrespondenceGraph:
    return CorrespondenceGraph({}, rho, n_sentences)


def build_correspondence_graph(embeddings, partitions, rho, sentence_keys) -> CorrespondenceGraph:
    """Connect same-partition sentences with cosine similarity > rho.

    ``partitions`` maps attribute values to global sentence indices;
    ``sentence_keys`` maps global index to embedding key. Every
    partitioned sentence must have an embedding. Comparison is
    brute-force within each partition, blocked over rows.
    """
    if not -1.0 <= rho <= 1.0:
        raise GraphError(f"rho must lie in [-1, 1], got {rho}")
    n = len(sentence_keys)
    neighbors = {}
    for value in sorted(partitions):
        sids = np.asarray(sorted(partitions[value]), dtype=np.int64)
        if sids.size == 0:
            continue
        try:
            rows = embeddings.rows_for([sentence_keys[i] for i in sids])
        except KeyError as exc:
            raise GraphError(f"no embedding for sentence {exc.args[0]!r}") from exc
        x = embeddings.vectors[rows].astype(np.float64)
        norms = np.linalg.norm(x, axis=1)
        if np.any(norms == 0.0):
            bad = sentence_keys[int(sids[int(np.argmin(norms))])]
            raise GraphError(f"zero-norm embedding for sentence {bad!r}")
        x /= norms[:, None]
        m = sids.size
        for start in range(0, m, _BLOCK):
            stop = min(start + _BLOCK, m)
            sims = x[start:stop] @ x.T
            for local in range(start, stop):
                row = sims[local - start]
                row[local] = -np.inf  # no self-loops
                hits = np.nonzero(row > rho)[0]
                if hits.size:
                    neighbors[int(sids[local])] = [int(sids[h]) for h in hits]
    return CorrespondenceGraph(neighbors, float(rho), n)


_GRAPH_HEADER = struct.Struct("<4sIQd")
_GRAPH_MAGIC = b"TRGR"


def save_graph(path, graph: CorrespondenceGraph) -> None:
    ids, ptr = graph.to_csr()
    with open(path, "wb") as fh:
        fh.write(_GRAPH_HEADER.pack(_GRAPH_MAGIC, 1, graph.n_sentences, graph.rho))
        fh.write(ptr.astype("<i8").tobytes())
        fh.write(ids.astype("<i8").tobytes())


def load_graph(path) -> CorrespondenceGraph:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _GRAPH_HEADER.size:
        raise EmbeddingFormatError(f"{path}: truncated graph header")
    magic, version, n, rho = _GRAPH_HEADER.unpack_from(data, 0)
    if magic != _GRAPH_MAGIC or version != 1:
        raise EmbeddingFormatError(f"{path}: not a graph file")
    off = _GRAPH_HEADER.size
    ptr = np.frombuffer(data, dtype="<i8", count=n + 1, offset=off).astype(np.int64)
    off += 8 * (n + 1)
    ids = np.frombuffer(data, dtype="<i8", count=int(ptr[-1]), offset=off).astype(np.int64)
    neighbors = {}
    for i in range(n):
        if ptr[i + 1] > ptr[i]:
            neighbors[i] = [int(j) for j in ids[ptr[i] : ptr[i + 1]]]
    return CorrespondenceGraph(neighbors, rho, n)


@dataclass
class PromotionTable:
    related: dict  # vocab_id -> list of (vocab_id, weight)
    epsilon: float
    threshold: float
    top_k: int
    vocab_size: int = 0

    def __len__(self):
        return sum(len(v) for v in self.related.values())

    def to_csr(self, vocab_size=None):
        w = self.vocab_size if vocab_size is None else vocab_size
        ptr = np.zeros(w + 1, dtype=np.int64)
        for v in range(w):
            ptr[v + 1] = ptr[v] + len(self.related.get(v, ()))
        ids = np.empty(ptr[-1], dtype=np.int64)
        wts = np.empty(ptr[-1], dtype=np.float64)
        for v in range(w):
            for k, (rid, wt) in enumerate(self.related.get(v, ())):
                ids[ptr[v] + k] = rid
                wts[ptr[v] + k] = wt
        return ids, wts, ptr


def empty_promotion(vocab_size: int, epsilon: float = 0.0) -> PromotionTable:
    return PromotionTable({}, epsilon, 1.0, 0, vocab_size)


def build_promotion_table(word_embeddings, vocabulary, epsilon, threshold=0.5,
                          top_k=10) -> PromotionTable:
    """For each embedded word, list up to top_k embedded words with cosine
    similarity >= threshold, each carrying weight epsilon.

    The relation is stored directionally as computed per word; ties on
    similarity break toward the lower vocabulary id. Words without
    embeddings get empty lists.
    """
    if not 0.0 < epsilon <= 1.0:
        raise GraphError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not -1.0 <= threshold <= 1.0:
        raise GraphError(f"promotion threshold must lie in [-1, 1], got {threshold}")
    if top_k < 1:
        raise GraphError(f"top_k must be >= 1, got {top_k}")

    w = len(vocabulary)
    vocab_ids, rows = [], []
    for v in range(w):
        row = word_embeddings.index.get(vocabulary.term_of(v))
        if row is not None:
            vocab_ids.append(v)
            rows.append(row)
    related = {}
    if not vocab_ids:
        return PromotionTable(related, float(epsilon), float(threshold), top_k, w)

    x = word_embeddings.vectors[np.asarray(rows)].astype(np.float64)
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0.0):
        bad = vocabulary.term_of(vocab_ids[int(np.argmin(norms))])
        raise GraphError(f"zero-norm embedding for word {bad!r}")
    x /= norms[:, None]
    ids = np.asarray(vocab_ids, dtype=np.int64)
    m = ids.size
    for start in range(0, m, _BLOCK):
        stop = min(start + _BLOCK, m)
        sims = x[start:stop] @ x.T
        for local in range(start, stop):
            row = sims[local - start]
            row[local] = -np.inf
            hits = np.nonzero(row >= threshold)[0]
            if hits.size == 0:
                continue
            order = sorted(hits, key=lambda h: (-row[h], ids[h]))[:top_k]
            related[int(ids[local])] = [(int(ids[h]), float(epsilon)) for h in order]
    return PromotionTable(related, float(epsilon), float(threshold), top_k, w)
