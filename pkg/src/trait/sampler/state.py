"""Sampler state: flattened corpus arrays, count tables, checkpoints.

The sampler works on CSR-style arrays rather than the object corpus:
token ids per sentence, distinct-word counts per sentence, the graph and
promotion tables as CSR, and dense count tables. The state is exactly
reconstructible from the assignment arrays (plus urn promotions), which
``rebuild_counts`` verifies.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from trait.errors import ConsistencyError
from trait.sampler import kernels
from trait.sampler.hyper import Hyperparams

_CKPT_MAGIC = b"TRCK"
_CKPT_HEADER = struct.Struct("<4sIQ")


@dataclass
class FlatCorpus:
    n_sentences: int
    n_docs: int
    n_attrs: int
    vocab_size: int
    sent_doc: np.ndarray    # (n,) document index per sentence
    sent_attr: np.ndarray   # (n,) attribute index per sentence
    tok_count: np.ndarray   # (n,) tokens per sentence, C_i
    uniq_ids: np.ndarray    # distinct vocab ids, CSR over sentences
    uniq_cnt: np.ndarray    # matching within-sentence counts, C_v^i
    uniq_ptr: np.ndarray    # (n+1,)
    doc_ids: list
    sentence_keys: list

    @classmethod
    def from_corpus(cls, corpus) -> "FlatCorpus":
        n = corpus.n_sentences
        sent_doc = np.empty(n, dtype=np.int64)
        sent_attr = np.empty(n, dtype=np.int64)
        tok_count = np.empty(n, dtype=np.int64)
        uniq_ptr = np.zeros(n + 1, dtype=np.int64)
        ids_parts, cnt_parts = [], []
        doc_idx = {id(doc): k for k, doc in enumerate(corpus.documents)}
        for g, doc, sent in corpus.iter_sentences():
            sent_doc[g] = doc_idx[id(doc)]
            sent_attr[g] = corpus.attribute_index[doc.attribute_value]
            vids = np.asarray(sent.vocab_ids(), dtype=np.int64)
            tok_count[g] = vids.size
            u, c = np.unique(vids, return_counts=True)
            ids_parts.append(u)
            cnt_parts.append(c.astype(np.int64))
            uniq_ptr[g + 1] = uniq_ptr[g] + u.size
        return cls(
            n_sentences=n,
            n_docs=corpus.n_documents,
            n_attrs=len(corpus.attribute_values),
            vocab_size=len(corpus.vocabulary),
            sent_doc=sent_doc,
            sent_attr=sent_attr,
            tok_count=tok_count,
            uniq_ids=np.concatenate(ids_parts) if ids_parts else np.empty(0, dtype=np.int64),
            uniq_cnt=np.concatenate(cnt_parts) if cnt_parts else np.empty(0, dtype=np.int64),
            uniq_ptr=uniq_ptr,
            doc_ids=[d.id for d in corpus.documents],
            sentence_keys=corpus.sentence_keys(),
        )


@dataclass
class CountTables:
    n_word: np.ndarray          # (S, T, W) float64, fractional urn counts
    n_word_total: np.ndarray    # (S, T)
    n_aspect: np.ndarray        # (S, A, T) int64
    n_aspect_total: np.ndarray  # (S, A)
    n_sent: np.ndarray          # (D, S) int64
    n_sent_total: np.ndarray    # (D,)

    @classmethod
    def zeros(cls, S, T, W, A, D) -> "CountTables":
        return cls(
            n_word=np.zeros((S, T, W), dtype=np.float64),
            n_word_total=np.zeros((S, T), dtype=np.float64),
            n_aspect=np.zeros((S, A, T), dtype=np.int64),
            n_aspect_total=np.zeros((S, A), dtype=np.int64),
            n_sent=np.zeros((D, S), dtype=np.int64),
            n_sent_total=np.zeros(D, dtype=np.int64),
        )

    def copy(self) -> "CountTables":
        return CountTables(self.n_word.copy(), self.n_word_total.copy(),
                           self.n_aspect.copy(), self.n_aspect_total.copy(),
                           self.n_sent.copy(), self.n_sent_total.copy())

    def max_abs_diff(self, other: "CountTables") -> float:
        diffs = [
            np.abs(self.n_word - other.n_word).max(initial=0.0),
            np.abs(self.n_word_total - other.n_word_total).max(initial=0.0),
            float(np.abs(self.n_aspect - other.n_aspect).max(initial=0)),
            float(np.abs(self.n_aspect_total - other.n_aspect_total).max(initial=0)),
            float(np.abs(self.n_sent - other.n_sent).max(initial=0)),
            float(np.abs(self.n_sent_total - other.n_sent_total).max(initial=0)),
        ]
        return max(diffs)


def _empty_graph_csr(n):
    return np.empty(0, dtype=np.int64), np.zeros(n + 1, dtype=np.int64)


def _empty_promo_csr(w):
    return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64),
            np.zeros(w + 1, dtype=np.int64))


@dataclass
class ModelState:
    flat: FlatCorpus
    hyper: Hyperparams
    alpha: np.ndarray
    alpha_sum: np.ndarray
    nbr_ids: np.ndarray
    nbr_ptr: np.ndarray
    promo_ids: np.ndarray
    promo_wt: np.ndarray
    promo_ptr: np.ndarray
    sent_s: np.ndarray
    sent_t: np.ndarray
    counts: CountTables
    rng: np.random.Generator
    sweep_index: int = 0
    # scratch buffers reused across sweeps
    _out: np.ndarray = field(default=None, repr=False)
    _mrf_cnt: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self._out is None:
            self._out = np.empty((self.hyper.S, self.hyper.T), dtype=np.float64)
        if self._mrf_cnt is None:
            self._mrf_cnt = np.zeros(self.hyper.T, dtype=np.int64)

    @property
    def beta_sum(self):
        return float(self.hyper.beta.sum())

    @property
    def gamma_sum(self):
        return float(self.hyper.gamma.sum())

    def rebuild_counts(self) -> CountTables:
        """Recompute all tables from the current assignments."""
        f = self.flat
        fresh = CountTables.zeros(self.hyper.S, self.hyper.T, f.vocab_size,
                                  f.n_attrs, f.n_docs)
        kernels.rebuild_tables(self.sent_s, self.sent_t,
                               f.sent_doc, f.sent_attr, f.uniq_ids, f.uniq_cnt,
                               f.uniq_ptr, self.promo_ids, self.promo_wt,
                               self.promo_ptr, fresh.n_word, fresh.n_word_total,
                               fresh.n_aspect, fresh.n_aspect_total,
                               fresh.n_sent, fresh.n_sent_total)
        return fresh

    def check_consistency(self, tol: float = 1e-6) -> None:
        """Raise when incremental tables drift from a full rebuild."""
        drift = self.counts.max_abs_diff(self.rebuild_counts())
        if drift > tol:
            raise ConsistencyError(f"count tables drifted {drift:.3e} from rebuild")
        row_gap = np.abs(
            self.counts.n_word.sum(axis=2) - self.counts.n_word_total
        ).max(initial=0.0)
        if row_gap > tol:
            raise ConsistencyError(f"n_word_total off by {row_gap:.3e}")

    def save_checkpoint(self, path) -> None:
        """Versioned binary dump: assignments, hyperparameters, rng state,
        and the sweep index. Counts are rebuilt on load."""
        h = self.hyper
        meta = {
            "S": h.S, "T": h.T,
            "beta": h.beta.tolist(), "gamma": h.gamma.tolist(),
            "lambda": h.lam, "epsilon": h.epsilon,
            "iterations": h.iterations, "burn_in": h.burn_in, "seed": h.seed,
            "alpha_high": h.alpha_high, "alpha_zero": h.alpha_zero,
            "alpha_base": h.alpha_base,
            "sweep_index": self.sweep_index,
            "n_sentences": self.flat.n_sentences,
            "vocab_size": self.flat.vocab_size,
            "rng_state": self.rng.bit_generator.state,
        }
        blob = json.dumps(meta, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(_CKPT_HEADER.pack(_CKPT_MAGIC, 1, len(blob)))
            fh.write(blob)
            fh.write(self.alpha.astype("<f8").tobytes())
            fh.write(self.sent_s.astype("<i4").tobytes())
            fh.write(self.sent_t.astype("<i4").tobytes())


def load_checkpoint(path):
    """Read a checkpoint; returns (meta dict, alpha, sent_s, sent_t)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _CKPT_HEADER.size:
        raise ConsistencyError(f"{path}: truncated checkpoint")
    magic, version, blob_len = _CKPT_HEADER.unpack_from(data, 0)
    if magic != _CKPT_MAGIC or version != 1:
        raise ConsistencyError(f"{path}: not a model checkpoint")
    off = _CKPT_HEADER.size
    meta = json.loads(data[off : off + blob_len].decode("utf-8"))
    off += blob_len
    s_count = meta["S"] * meta["vocab_size"]
    alpha = np.frombuffer(data, dtype="<f8", count=s_count, offset=off)
    alpha = alpha.reshape(meta["S"], meta["vocab_size"]).copy()
    off += 8 * s_count
    n = meta["n_sentences"]
    sent_s = np.frombuffer(data, dtype="<i4", count=n, offset=off).astype(np.int64)
    off += 4 * n
    sent_t = np.frombuffer(data, dtype="<i4", count=n, offset=off).astype(np.int64)
    off += 4 * n
    if off != len(data):
        raise ConsistencyError(f"{path}: {len(data) - off} trailing bytes")
    return meta, alpha, sent_s, sent_t


def init_state(corpus, graph, promotion, hyper: Hyperparams) -> ModelState:
    """Seeded uniform initialization with incrementally built tables.

    ``graph`` and ``promotion`` may be None for the unregularized model.
    Raises ConsistencyError when the graph or promotion table does not
    match the corpus.
    """
    flat = FlatCorpus.from_corpus(corpus)
    alpha = hyper.resolve_alpha(corpus.vocabulary)
    alpha_sum = alpha.sum(axis=1)

    if graph is None:
        nbr_ids, nbr_ptr = _empty_graph_csr(flat.n_sentences)
    else:
        if graph.n_sentences != flat.n_sentences:
            raise ConsistencyError(
                f"graph covers {graph.n_sentences} sentences, corpus has {flat.n_sentences}")
        nbr_ids, nbr_ptr = graph.to_csr()
        if nbr_ids.size and (nbr_ids.min() < 0 or nbr_ids.max() >= flat.n_sentences):
            raise ConsistencyError("graph names sentence ids outside the corpus")

    if promotion is None or len(promotion) == 0:
        promo_ids, promo_wt, promo_ptr = _empty_promo_csr(flat.vocab_size)
    else:
        if hyper.epsilon == 0.0:
            raise ConsistencyError("promotion table supplied but epsilon is 0")
        promo_ids, promo_wt, promo_ptr = promotion.to_csr(flat.vocab_size)
        if promo_ids.size and promo_ids.max() >= flat.vocab_size:
            raise ConsistencyError("promotion table names words outside the vocabulary")

    rng = np.random.default_rng(hyper.seed)
    sent_s = rng.integers(0, hyper.S, flat.n_sentences).astype(np.int64)
    sent_t = rng.integers(0, hyper.T, flat.n_sentences).astype(np.int64)

    counts = CountTables.zeros(hyper.S, hyper.T, flat.vocab_size,
                               flat.n_attrs, flat.n_docs)
    kernels.rebuild_tables(sent_s, sent_t, flat.sent_doc, flat.sent_attr,
                           flat.uniq_ids, flat.uniq_cnt, flat.uniq_ptr,
                           promo_ids, promo_wt, promo_ptr,
                           counts.n_word, counts.n_word_total,
                           counts.n_aspect, counts.n_aspect_total,
                           counts.n_sent, counts.n_sent_total)

    return ModelState(flat=flat, hyper=hyper, alpha=alpha, alpha_sum=alpha_sum,
                      nbr_ids=nbr_ids, nbr_ptr=nbr_ptr, promo_ids=promo_ids,
                      promo_wt=promo_wt, promo_ptr=promo_ptr,
                      sent_s=sent_s, sent_t=sent_t, counts=counts, rng=rng)
