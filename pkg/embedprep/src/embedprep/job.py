"""Embedding jobs: corpus in, TREM file plus sidecar manifest out."""

import json
import os
from dataclasses import dataclass

import numpy as np

from embedprep.corpus import sentence_entries, vocabulary_terms
from embedprep.encoders import get_encoder
from embedprep.trem import write_trem


@dataclass
class EmbeddingJob:
    corpus_path: str
    mode: str                 # "sentence" or "word"
    encoder_id: str = "hash"
    output_path: str = "embeddings.trem"
    batch_size: int = 32
    dim: int = 256            # hash encoder only; neural encoders fix their own

    def __post_init__(self):
        if self.mode not in ("sentence", "word"):
            raise ValueError(f"mode must be 'sentence' or 'word', got {self.mode!r}")


def _write_sidecar(job: EmbeddingJob, encoder, count: int, missing) -> None:
    manifest = {
        "encoder": encoder.id,
        "mode": job.mode,
        "dim": int(encoder.dim),
        "count": int(count),
        "missing": sorted(missing),
        "corpus": os.path.basename(job.corpus_path),
    }
    with open(job.output_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)


def embed_sentences(job: EmbeddingJob) -> int:
    """One vector per sentence, keyed ``<doc_id>#<sentence_index>``.

    Returns the record count. The file round-trips through the engine's
    loader; identical sentence text yields identical vectors."""
    encoder = get_encoder(job.encoder_id, dim=job.dim)
    entries = sentence_entries(job.corpus_path)
    keys = [key for key, _ in entries]
    texts = [text for _, text in entries]
    vectors = (encoder.encode(texts, batch_size=job.batch_size)
               if texts else np.zeros((0, encoder.dim), dtype=np.float32))
    write_trem(job.output_path, keys, vectors)
    _write_sidecar(job, encoder, len(keys), [])
    return len(keys)


def embed_words(job: EmbeddingJob) -> int:
    """One vector per vocabulary term the encoder can embed.

    Terms the encoder cannot represent (zero vectors) are left out of the
    file and listed in the sidecar report."""
    encoder = get_encoder(job.encoder_id, dim=job.dim)
    terms = vocabulary_terms(job.corpus_path)
    vectors = (encoder.encode(terms, batch_size=job.batch_size)
               if terms else np.zeros((0, encoder.dim), dtype=np.float32))
    norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
    keep = norms > 0.0
    missing = [t for t, ok in zip(terms, keep) if not ok]
    kept_terms = [t for t, ok in zip(terms, keep) if ok]
    write_trem(job.output_path, kept_terms, vectors[keep])
    _write_sidecar(job, encoder, len(kept_terms), missing)
    return len(kept_terms)
