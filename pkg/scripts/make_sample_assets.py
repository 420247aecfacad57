"""Regenerate the bundled sample corpus and embedding files.

Writes sample/raw.jsonl (50 hotel-style reviews over three cities),
sample/sent.trem and sample/word.trem (deterministic pseudo-embeddings
aligned with each sentence's topical category), and sample/config.toml.
The embeddings are keyed against the preprocessed corpus, so regenerate
them whenever the normalization rules change.

Usage: python scripts/make_sample_assets.py [out_dir]
"""

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from trait.corpus.model import load_corpus  # noqa: E402
from trait.graph.embeddings import save_trem  # noqa: E402

CITIES = ("vegas", "boston", "orlando")

# Each category holds positive and negative sentence templates. Sentences
# never mix polarities: with a hard zero prior on mismatched lexicon words
# a mixed sentence has no admissible assignment.
TEMPLATES = {
    "room": (
        ["The room was clean and comfortable.",
         "Our room had a great view of the skyline.",
         "Housekeeping kept the room perfect all week.",
         "The suite felt spacious and the bed was excellent."],
        ["The room was small and the carpet was worn.",
         "Our room smelled bad and the walls were thin.",
         "The bathroom was a mess and the shower leaked.",
         "The bed was terrible and the pillows were flat."],
    ),
    "pool": (
        ["The pool area was fantastic in the afternoon.",
         "We loved the heated pool and the hot tub.",
         "Poolside service was quick and the towels were free."],
        ["The pool was closed and nobody could explain why.",
         "The hot tub was nasty and the deck was slippery.",
         "Pool chairs were broken and the water felt cold."],
    ),
    "staff": (
        ["The staff were friendly and check in was fast.",
         "Reception upgraded us for free, amazing service.",
         "The concierge gave excellent restaurant advice."],
        ["The front desk was slow and the manager was rude.",
         "Staff ignored our complaints about the noise.",
         "Check in took an hour, completely unacceptable."],
    ),
    "location": (
        ["The location was perfect for walking downtown.",
         "Great location near the strip and the casinos.",
         "Easy access to the subway made the trip fun."],
        ["The location was noisy and felt unsafe at night.",
         "Terrible location, far from everything worth seeing.",
         "Traffic noise made sleep impossible, very annoying."],
    ),
    "breakfast": (
        ["Breakfast was excellent with fresh fruit every day.",
         "We enjoyed the waffles and the coffee was great.",
         "The buffet had impressive variety for $15."],
        ["Breakfast was a waste of money at $30 per person.",
         "The coffee was cold and the eggs tasted wrong.",
         "The buffet line was slow and the food was poor."],
    ),
}

CATEGORIES = list(TEMPLATES)


def build_raw_docs(rng, n_docs=50):
    docs = []
    labels = []  # per document: list of category indices, one per sentence
    for d in range(n_docs):
        city = CITIES[int(rng.integers(0, len(CITIES)))]
        positive = bool(rng.random() < 0.55)
        n_sent = int(rng.integers(4, 8))
        sentences, cats = [], []
        for _ in range(n_sent):
            cat = int(rng.integers(0, len(CATEGORIES)))
            pos_templates, neg_templates = TEMPLATES[CATEGORIES[cat]]
            pool = pos_templates if (positive ^ (rng.random() < 0.1)) else neg_templates
            sentences.append(pool[int(rng.integers(0, len(pool)))])
            cats.append(cat)
        rating = int(rng.integers(4, 6)) if positive else int(rng.integers(1, 3))
        docs.append({
            "id": f"r{d:03d}",
            "attribute": city,
            "rating": rating,
            "text": " ".join(sentences),
        })
        labels.append(cats)
    return docs, labels


def main(out_dir="sample"):
    rng = np.random.default_rng(20240817)
    os.makedirs(out_dir, exist_ok=True)

    docs, labels = build_raw_docs(rng)
    raw_path = os.path.join(out_dir, "raw.jsonl")
    with open(raw_path, "w", encoding="utf-8") as fh:
        for rec in docs:
            fh.write(json.dumps(rec) + "\n")

    corpus = load_corpus(raw_path)
    flat_labels = [c for cats in labels for c in cats]
    assert corpus.n_sentences == len(flat_labels), \
        "every template sentence must survive normalization"

    dim = 8
    keys = corpus.sentence_keys()
    vecs = rng.normal(0.0, 0.08, size=(len(keys), dim))
    for i, cat in enumerate(flat_labels):
        vecs[i, cat] += 1.0
    vecs /= np.linalg.norm(vecs, axis=1)[:, None]
    save_trem(os.path.join(out_dir, "sent.trem"), keys, vecs.astype(np.float32))

    # word vectors point at the category the word most often appears under
    word_cat = {}
    k = 0
    for doc in corpus.documents:
        for sent in doc.sentences:
            for tok in sent.surfaces():
                word_cat.setdefault(tok, []).append(flat_labels[k])
            k += 1
    terms = corpus.vocabulary.terms
    wvecs = rng.normal(0.0, 0.08, size=(len(terms), dim))
    for v, term in enumerate(terms):
        cats = word_cat.get(term, [])
        if cats:
            wvecs[v, int(np.bincount(cats).argmax())] += 1.0
    wvecs /= np.linalg.norm(wvecs, axis=1)[:, None]
    save_trem(os.path.join(out_dir, "word.trem"), terms, wvecs.astype(np.float32))

    config = """# bundled sample pipeline configuration
seed = 42
out_dir = "run_sample"

[paths]
raw = "sample/raw.jsonl"
sent_emb = "sample/sent.trem"
word_emb = "sample/word.trem"

[hyper]
T = 5
S = 2
epsilon = 0.3
rho = 0.7
iterations = 60
burn_in = 60

[evaluation]
coherence_top_n = 10
profile_top_k = 5
"""
    with open(os.path.join(out_dir, "config.toml"), "w", encoding="utf-8") as fh:
        fh.write(config)
    print(f"wrote sample assets: {corpus.n_documents} docs, "
          f"{corpus.n_sentences} sentences, vocab {len(corpus.vocabulary)}")


if __name__ == "__main__":
    main(*sys.argv[1:])
