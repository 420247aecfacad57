"""Posterior point estimates and attribute profiles.

Estimates are pure functions of the count tables and priors, computed
from the single final post-burn-in sample:

    phi[s][t][v]   = (n_word[s][t][v] + alpha(s, v)) / sum over v'
    psi[s][a][t]   = (n_aspect[s][a][t] + gamma_t)   / sum over t'
    theta[d][s]    = (n_sent[d][s] + beta_s)         / sum over s'
"""

import json
from dataclasses import dataclass

import numpy as np

from trait.errors import TraitError


@dataclass
class PosteriorEstimates:
    phi: np.ndarray    # (S, T, W)
    psi: np.ndarray    # (S, A, T)
    theta: np.ndarray  # (D, S)
    vocab_terms: list
    attribute_values: list
    doc_ids: list

    def save_json(self, path) -> None:
        payload = {
            "phi": self.phi.tolist(),
            "psi": self.psi.tolist(),
            "theta": self.theta.tolist(),
            "meta": {
                "S": int(self.phi.shape[0]),
                "T": int(self.phi.shape[1]),
                "W": int(self.phi.shape[2]),
                "A": int(self.psi.shape[1]),
                "D": int(self.theta.shape[0]),
                "vocab_terms": list(self.vocab_terms),
                "attribute_values": list(self.attribute_values),
                "doc_ids": list(self.doc_ids),
                "sentiment_order": ["positive", "negative"],
            },
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)

    @classmethod
    def load_json(cls, path) -> "PosteriorEstimates":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        meta = payload["meta"]
        return cls(
            phi=np.asarray(payload["phi"], dtype=np.float64),
            psi=np.asarray(payload["psi"], dtype=np.float64),
            theta=np.asarray(payload["theta"], dtype=np.float64),
            vocab_terms=meta["vocab_terms"],
            attribute_values=meta["attribute_values"],
            doc_ids=meta["doc_ids"],
        )


def estimate_phi(state) -> np.ndarray:
    numer = state.counts.n_word + state.alpha[:, None, :]
    denom = numer.sum(axis=2, keepdims=True)
    if np.any(denom <= 0.0):
        raise TraitError("phi denominator is zero: empty counts under an all-zero prior")
    return numer / denom


def estimate_psi(state) -> np.ndarray:
    numer = state.counts.n_aspect + state.hyper.gamma[None, None, :]
    return numer / numer.sum(axis=2, keepdims=True)


def estimate_theta(state) -> np.ndarray:
    docs = state.counts.n_sent
    if np.any(state.counts.n_sent_total <= 0):
        raise TraitError("theta undefined for a document with no sentences")
    numer = docs + state.hyper.beta[None, :]
    return numer / numer.sum(axis=1, keepdims=True)


def estimate_all(state, corpus) -> PosteriorEstimates:
    return PosteriorEstimates(
        phi=estimate_phi(state),
        psi=estimate_psi(state),
        theta=estimate_theta(state),
        vocab_terms=list(corpus.vocabulary.terms),
        attribute_values=list(corpus.attribute_values),
        doc_ids=[d.id for d in corpus.documents],
    )


def top_words(phi, vocabulary, s: int, t: int, n: int = 20):
    """The n most probable (term, probability) pairs for a sentiment-aspect
    pair, ties broken toward the lower vocabulary id. Asking for more terms
    than the vocabulary holds returns them all."""
    if n < 1:
        raise TraitError(f"top_words needs n >= 1, got {n}")
    row = np.asarray(phi[s][t], dtype=np.float64)
    order = sorted(range(row.size), key=lambda v: (-row[v], v))[:n]
    if hasattr(vocabulary, "term_of"):
        return [(vocabulary.term_of(v), float(row[v])) for v in order]
    return [(vocabulary[v], float(row[v])) for v in order]


@dataclass
class AttributeProfile:
    attribute_value: str
    aspect_distributions: np.ndarray  # (S, T), psi rows for this attribute
    ranked: list  # per sentiment: [(aspect_id, probability), ...] descending

    def as_dict(self):
        names = ["positive", "negative"]
        sentiments = {}
        for s in range(self.aspect_distributions.shape[0]):
            name = names[s] if s < len(names) else f"sentiment{s}"
            sentiments[name] = {
                "psi": self.aspect_distributions[s].tolist(),
                "ranked": [[int(t), float(p)] for t, p in self.ranked[s]],
            }
        return {"attribute": self.attribute_value, "sentiments": sentiments}


def build_profiles(psi, attribute_index, top_k: int = 30):
    """One profile per attribute value: per-sentiment full psi rows plus the
    top_k aspects ranked by probability (ties toward the lower aspect id).

    Profiles carry the full distributions because downstream distance
    computations need more than the truncated ranking."""
    psi = np.asarray(psi, dtype=np.float64)
    S, _, T = psi.shape
    profiles = []
    for value, a in sorted(attribute_index.items(), key=lambda kv: kv[1]):
        ranked = []
        for s in range(S):
            row = psi[s, a]
            order = sorted(range(T), key=lambda t: (-row[t], t))[:top_k]
            ranked.append([(int(t), float(row[t])) for t in order])
        profiles.append(AttributeProfile(value, psi[:, a, :].copy(), ranked))
    return profiles


def save_profiles(path, profiles) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([p.as_dict() for p in profiles], fh, sort_keys=True)


def load_profiles(path):
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    names = {"positive": 0, "negative": 1}
    profiles = []
    for entry in raw:
        sents = entry["sentiments"]
        order = sorted(sents, key=lambda k: names.get(k, len(names)))
        dist = np.asarray([sents[k]["psi"] for k in order], dtype=np.float64)
        ranked = [[(int(t), float(p)) for t, p in sents[k]["ranked"]] for k in order]
        profiles.append(AttributeProfile(entry["attribute"], dist, ranked))
    return profiles
