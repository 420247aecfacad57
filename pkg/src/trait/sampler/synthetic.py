"""Synthetic corpora drawn from the model's own generative process.

Generation follows the three-step story exactly: per document draw a
sentiment mixture, then per sentence draw a sentiment, an aspect given
(sentiment, attribute), and finally that sentence's words from the
(sentiment, aspect) word distribution. Ground-truth parameters and
per-sentence labels are returned alongside, enabling
generate-then-recover protocols.
"""

from dataclasses import dataclass, field

import numpy as np

from trait.corpus.model import Corpus, Document, Sentence, Token, Vocabulary
from trait.errors import ConfigError


@dataclass
class SyntheticTruth:
    phi: np.ndarray      # (S, T, W)
    psi: np.ndarray      # (S, A, T)
    theta: np.ndarray    # (D, S)
    sent_s: np.ndarray   # planted sentiment per sentence, corpus order
    sent_t: np.ndarray   # planted aspect per sentence, corpus order


@dataclass
class SyntheticSpec:
    n_docs: int
    T: int
    S: int = 2
    vocab_size: int = 200
    attribute_values: tuple = ("a0", "a1")
    sentences_per_doc: tuple = (4, 8)    # inclusive range
    tokens_per_sentence: tuple = (5, 9)  # inclusive range
    phi: np.ndarray | None = None        # explicit (S, T, W), else drawn
    psi: np.ndarray | None = None        # explicit (S, A, T), else drawn
    phi_dirichlet: float = 0.05
    psi_dirichlet: float = 1.0
    theta_dirichlet: object = (5.0, 5.0)
    vocab_prefix: str = "w"
    rate_documents: bool = True          # rating 4 when positive mass wins, else 2

    def term(self, v: int) -> str:
        return f"{self.vocab_prefix}{v:03d}"


def _draw_dirichlet(params, rng) -> np.ndarray:
    """Dirichlet draw that treats zero-parameter components as absent."""
    params = np.asarray(params, dtype=np.float64)
    out = np.zeros_like(params)
    pos = params > 0.0
    if not pos.any():
        raise ConfigError("Dirichlet parameters must include a positive entry")
    g = rng.gamma(shape=params[pos])
    while g.sum() == 0.0:
        g = rng.gamma(shape=params[pos])
    out[pos] = g / g.sum()
    return out


def blocked_phi(S, T, W, rng, block_mass: float = 0.95, overlap: float = 0.0) -> np.ndarray:
    """Well-separated word distributions: each (s, t) concentrates on its
    own contiguous word block, with optional cross-block overlap mass."""
    n_rows = S * T
    block = W // n_rows
    if block < 1:
        raise ConfigError(f"vocabulary of {W} too small for {n_rows} blocks")
    phi = np.zeros((S, T, W), dtype=np.float64)
    row = 0
    for s in range(S):
        for t in range(T):
            weights = np.full(W, (1.0 - block_mass) / W, dtype=np.float64)
            lo = row * block
            inside = rng.random(block) + 0.5
            weights[lo : lo + block] += block_mass * (1.0 - overlap) * inside / inside.sum()
            if overlap > 0.0:
                spill = rng.random(W) + 0.5
                weights += block_mass * overlap * spill / spill.sum()
            phi[s, t] = weights / weights.sum()
            row += 1
    return phi


def lexicon_seeded_phi(S, T, W, rng, positive_ids, negative_ids,
                       lexicon_mass: float = 0.4) -> np.ndarray:
    """Word distributions whose sentiment rows favor their polarity words,
    layered over blocked aspect structure.

    Each sentiment's rows carry exactly zero mass on the opposite
    polarity's words, mirroring the hard zero prior those words get under
    a mismatched sentiment: the planted model never generates a sentence
    the prior rules out."""
    phi = blocked_phi(S, T, W, rng)
    for t in range(T):
        for s, own, other in ((0, positive_ids, negative_ids),
                              (1, negative_ids, positive_ids)):
            if len(other):
                phi[s, t, np.asarray(other)] = 0.0
            if len(own):
                boost = np.zeros(W)
                boost[np.asarray(own)] = 1.0 / len(own)
                phi[s, t] = (1.0 - lexicon_mass) * phi[s, t] / phi[s, t].sum() \
                    + lexicon_mass * boost
            phi[s, t] /= phi[s, t].sum()
    return phi


def generate_synthetic(spec: SyntheticSpec, seed: int):
    """Sample a corpus via the generative process; returns (Corpus, truth)."""
    rng = np.random.default_rng(seed)
    S, T, W = spec.S, spec.T, spec.vocab_size
    A = len(spec.attribute_values)

    if spec.phi is not None:
        phi = np.asarray(spec.phi, dtype=np.float64)
    else:
        phi = np.stack([
            np.stack([_draw_dirichlet(np.full(W, spec.phi_dirichlet), rng)
                      for _ in range(T)])
            for _ in range(S)
        ])
    if phi.shape != (S, T, W):
        raise ConfigError(f"phi must have shape {(S, T, W)}, got {phi.shape}")

    if spec.psi is not None:
        psi = np.asarray(spec.psi, dtype=np.float64)
    else:
        psi = np.stack([
            np.stack([_draw_dirichlet(np.full(T, spec.psi_dirichlet), rng)
                      for _ in range(A)])
            for _ in range(S)
        ])
    if psi.shape != (S, A, T):
        raise ConfigError(f"psi must have shape {(S, A, T)}, got {psi.shape}")

    theta_prior = np.asarray(spec.theta_dirichlet, dtype=np.float64)
    if theta_prior.shape != (S,):
        raise ConfigError(f"theta_dirichlet must have length {S}")

    terms = [spec.term(v) for v in range(W)]
    vocabulary = Vocabulary(terms, [0] * W)

    lo_m, hi_m = spec.sentences_per_doc
    lo_n, hi_n = spec.tokens_per_sentence
    documents = []
    theta = np.empty((spec.n_docs, S), dtype=np.float64)
    labels_s, labels_t = [], []
    freq = np.zeros(W, dtype=np.int64)

    for d in range(spec.n_docs):
        a = int(rng.integers(0, A))
        theta[d] = _draw_dirichlet(theta_prior, rng)
        m = int(rng.integers(lo_m, hi_m + 1))
        sentences = []
        doc_id = f"doc{d:05d}"
        for j in range(m):
            s = int(rng.choice(S, p=theta[d]))
            t = int(rng.choice(T, p=psi[s, a]))
            n = int(rng.integers(lo_n, hi_n + 1))
            vids = rng.choice(W, size=n, p=phi[s, t])
            freq[vids] += 1
            tokens = [Token(terms[v], int(v)) for v in vids]
            sentences.append(Sentence(tokens, doc_id, j))
            labels_s.append(s)
            labels_t.append(t)
        rating = None
        if spec.rate_documents:
            rating = 4 if theta[d, 0] >= 0.5 else 2
        documents.append(Document(doc_id, spec.attribute_values[a], rating, sentences))

    vocabulary.frequencies = freq.tolist()
    attribute_index = {v: k for k, v in enumerate(spec.attribute_values)}
    corpus = Corpus(documents, vocabulary, attribute_index, list(spec.attribute_values))
    truth = SyntheticTruth(phi=phi, psi=psi, theta=theta,
                           sent_s=np.asarray(labels_s, dtype=np.int64),
                           sent_t=np.asarray(labels_t, dtype=np.int64))
    return corpus, truth


def aspect_aligned_embeddings(corpus, truth: SyntheticTruth, seed: int,
                              noise: float = 0.05, groups_per_aspect: int = 1):
    """Sentence vectors that encode the planted aspect, so same-aspect
    sentences are near-parallel and a thresholded graph recovers the
    planted structure.

    With ``groups_per_aspect`` > 1 each sentence also lands in a random
    subgroup of its aspect and is only parallel to that subgroup; a
    thresholded graph then shows the sparse neighborhoods that real
    similar-sentence graphs have, rather than full per-aspect cliques.

    Returns (keys, vectors float32) ready for the TREM writer."""
    rng = np.random.default_rng(seed)
    T = int(truth.sent_t.max()) + 1 if truth.sent_t.size else 1
    k = max(int(groups_per_aspect), 1)
    dim = max(T * k, 4)
    n = truth.sent_t.size
    vec = rng.normal(0.0, noise, size=(n, dim))
    slot = truth.sent_t * k + rng.integers(0, k, size=n)
    vec[np.arange(n), slot] += 1.0
    vec /= np.linalg.norm(vec, axis=1)[:, None]
    return corpus.sentence_keys(), vec.astype(np.float32)


def block_word_embeddings(spec: SyntheticSpec, seed: int, noise: float = 0.05):
    """Word vectors clustered by their phi block, for promotion tables."""
    rng = np.random.default_rng(seed)
    n_rows = spec.S * spec.T
    block = max(spec.vocab_size // n_rows, 1)
    dim = max(n_rows, 4)
    vec = rng.normal(0.0, noise, size=(spec.vocab_size, dim))
    for v in range(spec.vocab_size):
        vec[v, min(v // block, n_rows - 1)] += 1.0
    vec /= np.linalg.norm(vec, axis=1)[:, None]
    keys = [spec.term(v) for v in range(spec.vocab_size)]
    return keys, vec.astype(np.float32)
