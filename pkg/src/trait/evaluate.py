"""Evaluation: topic coherence, sentiment classification, profile distance.

All metrics are pure functions. Logarithms are base 2 throughout so the
Jensen-Shannon distance lands in [0, 1]; classification ties break toward
the positive class.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from trait.errors import TraitError
from trait.graph.build import cosine_similarity

_SMOOTH = 1e-12


# ---------------------------------------------------------------------------
# topic coherence


@dataclass
class CoherenceReport:
    npmi: dict = field(default_factory=dict)   # (s, t) -> score or None
    w2v: dict = field(default_factory=dict)    # (s, t) -> score or None

    @staticmethod
    def _mean(scores):
        vals = [v for v in scores.values() if v is not None]
        return float(np.mean(vals)) if vals else None

    @property
    def npmi_mean(self):
        return self._mean(self.npmi)

    @property
    def w2v_mean(self):
        return self._mean(self.w2v)

    def as_dict(self):
        return {
            "npmi": {f"{s},{t}": v for (s, t), v in sorted(self.npmi.items())},
            "w2v": {f"{s},{t}": v for (s, t), v in sorted(self.w2v.items())},
            "npmi_mean": self.npmi_mean,
            "w2v_mean": self.w2v_mean,
        }


def _reference_counts(reference_docs):
    """Document frequency of terms and of unordered term pairs."""
    doc_sets = [set(doc) for doc in reference_docs]
    df = {}
    for terms in doc_sets:
        for w in terms:
            df[w] = df.get(w, 0) + 1
    return doc_sets, df


def _pair_df(doc_sets, wi, wj):
    return sum(1 for terms in doc_sets if wi in terms and wj in terms)


def npmi_score(words, doc_sets, df, n_docs, scale: float = 100.0):
    """Mean pairwise normalized PMI over one topic's word list, scaled.

    npmi(wi, wj) = log(p(wi, wj) / (p(wi) p(wj))) / -log p(wi, wj), with
    the joint probability smoothed by 1e-12. Pairs with a word absent from
    the reference are skipped; None when every pair is skipped."""
    present = [w for w in dict.fromkeys(words) if df.get(w, 0) > 0]
    vals = []
    for i in range(len(present)):
        for j in range(i + 1, len(present)):
            wi, wj = present[i], present[j]
            p_i = df[wi] / n_docs
            p_j = df[wj] / n_docs
            p_ij = _pair_df(doc_sets, wi, wj) / n_docs + _SMOOTH
            vals.append(math.log(p_ij / (p_i * p_j)) / -math.log(p_ij))
    if not vals:
        return None
    return scale * float(np.mean(vals))


def npmi_coherence(topics, reference_docs, window: str = "document",
                   scale: float = 100.0) -> dict:
    """Score each topic word list against reference co-occurrence counts.

    ``topics`` maps a label to a word list; ``reference_docs`` is an
    iterable of token iterables. ``window`` is "document" (co-occurrence
    within whole documents) or "sentence" (each sentence is a window)."""
    if window == "document":
        windows = [list(doc) for doc in reference_docs]
    elif window == "sentence":
        windows = [list(sent) for doc in reference_docs for sent in doc]
    else:
        raise TraitError(f"unknown window policy {window!r}")
    doc_sets, df = _reference_counts(windows)
    return {label: npmi_score(words, doc_sets, df, len(doc_sets), scale)
            for label, words in topics.items()}


def w2v_score(words, embeddings):
    """Mean pairwise cosine similarity over a topic's embedded words; None
    when fewer than two have embeddings."""
    vecs = []
    for w in dict.fromkeys(words):
        v = embeddings.get(w)
        if v is not None:
            vecs.append(np.asarray(v, dtype=np.float64))
    if len(vecs) < 2:
        return None
    vals = []
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            vals.append(cosine_similarity(vecs[i], vecs[j]))
    return float(np.mean(vals))


def w2v_coherence(topics, embeddings) -> dict:
    return {label: w2v_score(words, embeddings) for label, words in topics.items()}


def coherence_report(phi, vocabulary, corpus, word_embeddings=None,
                     top_n: int = 20, window: str = "document") -> CoherenceReport:
    """NPMI (reference = the corpus itself) and optional embedding scores
    for the top_n words of every sentiment-aspect pair."""
    from trait.estimates import top_words

    S, T = np.asarray(phi).shape[:2]
    topics = {}
    for s in range(S):
        for t in range(T):
            topics[(s, t)] = [w for w, _ in top_words(phi, vocabulary, s, t, top_n)]
    docs = [[tok for sent in d.sentences for tok in sent.surfaces()]
            for d in corpus.documents]
    report = CoherenceReport()
    report.npmi = npmi_coherence(topics, docs, window=window)
    if word_embeddings is not None:
        report.w2v = w2v_coherence(topics, word_embeddings)
    else:
        report.w2v = {label: None for label in topics}
    return report


# ---------------------------------------------------------------------------
# sentiment classification


@dataclass
class ClassificationReport:
    accuracy: float
    auc: float
    true_positive: int
    true_negative: int
    false_positive: int
    false_negative: int
    excluded: int = 0

    @property
    def total(self):
        return (self.true_positive + self.true_negative
                + self.false_positive + self.false_negative)

    def as_dict(self):
        return {
            "accuracy": self.accuracy, "auc": self.auc,
            "confusion": {
                "tp": self.true_positive, "tn": self.true_negative,
                "fp": self.false_positive, "fn": self.false_negative,
            },
            "excluded": self.excluded,
        }


def classify_documents(theta, positive_index: int = 0):
    """Predicted labels (True = positive) and positive-class scores.

    The label is the argmax sentiment; exact ties go to the positive
    class. The score column feeds the AUC computation."""
    theta = np.asarray(theta, dtype=np.float64)
    scores = theta[:, positive_index]
    others = np.delete(theta, positive_index, axis=1)
    labels = scores >= others.max(axis=1)
    return labels, scores


def ground_truth_labels(corpus):
    """(labels, kept_doc_indices, excluded_count): rating >= 3 is positive;
    unrated documents are excluded."""
    labels, kept = [], []
    excluded = 0
    for k, doc in enumerate(corpus.documents):
        if doc.rating is None:
            excluded += 1
            continue
        labels.append(doc.rating >= 3)
        kept.append(k)
    return np.asarray(labels, dtype=bool), kept, excluded


def auc_roc(scores, labels) -> float:
    """Probability a random positive outscores a random negative, ties at
    half credit (the rank-sum formulation with midranks)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise TraitError("scores and labels must be aligned vectors")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise TraitError("AUC needs at least one positive and one negative label")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum = float(ranks[labels].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def classification_report(theta, corpus, positive_index: int = 0) -> ClassificationReport:
    truth, kept, excluded = ground_truth_labels(corpus)
    if len(kept) == 0:
        raise TraitError("no rated documents to evaluate")
    pred, scores = classify_documents(np.asarray(theta)[kept], positive_index)
    tp = int(np.sum(pred & truth))
    tn = int(np.sum(~pred & ~truth))
    fp = int(np.sum(pred & ~truth))
    fn = int(np.sum(~pred & truth))
    acc = (tp + tn) / len(kept)
    auc = auc_roc(scores, truth)
    return ClassificationReport(acc, auc, tp, tn, fp, fn, excluded)


# ---------------------------------------------------------------------------
# distribution distance


def _smooth(p):
    p = np.asarray(p, dtype=np.float64) + _SMOOTH
    return p / p.sum()


def kl_divergence(p, q) -> float:
    """Kullback-Leibler divergence in bits; inputs are smoothed by 1e-12
    and renormalized, so zero components are handled gracefully."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise TraitError(f"distribution length mismatch: {p.shape} vs {q.shape}")
    ps = _smooth(p)
    qs = _smooth(q)
    return float(np.sum(ps * np.log2(ps / qs)))


def js_distance(p, q) -> float:
    """Square root of the Jensen-Shannon divergence, base 2, in [0, 1]."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise TraitError(f"distribution length mismatch: {p.shape} vs {q.shape}")
    m = 0.5 * (p + q)
    div = 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m)
    return math.sqrt(max(div, 0.0))


@dataclass
class SimilarityMatrix:
    labels: list
    distances: np.ndarray

    def as_dict(self):
        return {"labels": list(self.labels), "distances": self.distances.tolist()}

    def save_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\t" + "\t".join(self.labels) + "\n")
            for label, row in zip(self.labels, self.distances):
                fh.write(label + "\t" + "\t".join(f"{v:.6f}" for v in row) + "\n")


def combined_profile_vector(profile) -> np.ndarray:
    """One distribution of length S*T: each sentiment's aspect row weighted
    by 1/S, so both polarities contribute equally to profile distance."""
    dist = np.asarray(profile.aspect_distributions, dtype=np.float64)
    s = dist.shape[0]
    return np.concatenate([dist[k] / s for k in range(s)])


def profile_distance_matrix(profiles, normalize: bool = True) -> SimilarityMatrix:
    """Pairwise Jensen-Shannon distances between attribute profiles,
    optionally divided by the largest off-diagonal entry so values span
    [0, 1] (zero matrices are left unnormalized)."""
    if not profiles:
        raise TraitError("no profiles to compare")
    vecs = [combined_profile_vector(p) for p in profiles]
    sizes = {v.size for v in vecs}
    if len(sizes) != 1:
        raise TraitError("profiles disagree in shape")
    n = len(profiles)
    dist = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            d = js_distance(vecs[i], vecs[j])
            dist[i, j] = dist[j, i] = d
    if normalize and n > 1:
        hi = dist.max()
        if hi > 0.0:
            dist = dist / hi
    return SimilarityMatrix([p.attribute_value for p in profiles], dist)


def baseline_similarity(set_d, set_r) -> float:
    """Mean-embedding review-set similarity:
    (1 / (m + n)) * sum_i sum_j cos(d_i, r_j), including that 1/(m+n)
    normalization."""
    set_d = [np.asarray(v, dtype=np.float64) for v in set_d]
    set_r = [np.asarray(v, dtype=np.float64) for v in set_r]
    if not set_d or not set_r:
        raise TraitError("baseline similarity of an empty review set")
    total = 0.0
    for d in set_d:
        for r in set_r:
            total += cosine_similarity(d, r)
    return total / (len(set_d) + len(set_r))


def review_mean_embeddings(corpus, sentence_embeddings):
    """Per-document mean sentence vector, grouped by attribute value."""
    groups = {}
    for doc in corpus.documents:
        rows = []
        for sent in doc.sentences:
            v = sentence_embeddings.get(f"{doc.id}#{sent.index_in_doc}")
            if v is not None:
                rows.append(np.asarray(v, dtype=np.float64))
        if rows:
            groups.setdefault(doc.attribute_value, []).append(
                np.mean(np.stack(rows), axis=0))
    return groups


def baseline_similarity_matrix(corpus, sentence_embeddings) -> SimilarityMatrix:
    groups = review_mean_embeddings(corpus, sentence_embeddings)
    labels = [v for v in corpus.attribute_values if v in groups]
    n = len(labels)
    sims = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            sims[i, j] = baseline_similarity(groups[labels[i]], groups[labels[j]])
    return SimilarityMatrix(labels, sims)
