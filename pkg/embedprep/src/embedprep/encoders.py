"""Pluggable text encoders.

The default is a deterministic feature-hashing encoder: no model
downloads, byte-reproducible output, identical text always maps to the
identical vector. Neural encoders from sentence-transformers plug in via
the ``st:<model-name>`` id when that package is installed.
"""

import hashlib

import numpy as np


class EncoderError(RuntimeError):
    pass


def _feature_slot(feature: str, dim: int):
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    value = int.from_bytes(digest, "little")
    return (value >> 1) % dim, 1.0 if value & 1 else -1.0


class HashingEncoder:
    """Signed feature hashing over word unigrams, word bigrams, and
    character trigrams, L2-normalized. Deterministic across runs and
    platforms (keyed on blake2b, not Python's seeded hash)."""

    def __init__(self, dim: int = 256):
        if dim < 8:
            raise EncoderError(f"hash encoder dimension too small: {dim}")
        self.dim = dim
        self.id = f"hash-{dim}"

    @staticmethod
    def _features(text: str):
        words = text.lower().split()
        for w in words:
            yield "w:" + w
        for a, b in zip(words, words[1:]):
            yield "b:" + a + "_" + b
        padded = "^" + "".join(words) + "$"
        for k in range(len(padded) - 2):
            yield "c:" + padded[k : k + 3]

    def encode(self, texts, batch_size: int = 0):
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            for feature in self._features(text):
                slot, sign = _feature_slot(feature, self.dim)
                out[row, slot] += sign
            norm = np.linalg.norm(out[row])
            if norm > 0.0:
                out[row] /= norm
            else:
                # degenerate text: a stable non-zero fallback direction
                slot, sign = _feature_slot("empty:" + text, self.dim)
                out[row, slot] = sign
        return out.astype(np.float32)


class SentenceTransformerEncoder:
    """Adapter for sentence-transformers models (``st:<model-name>``)."""

    def __init__(self, model_name: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderError(
                "sentence-transformers is not installed; use the hash encoder "
                "or install the 'st' extra") from exc
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as exc:
            raise EncoderError(f"failed to load encoder {model_name!r}: {exc}") from exc
        self.id = f"st:{model_name}"
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts, batch_size: int = 32):
        vectors = self._model.encode(list(texts), batch_size=batch_size or 32,
                                     convert_to_numpy=True,
                                     normalize_embeddings=True,
                                     show_progress_bar=False)
        return np.asarray(vectors, dtype=np.float32)


def get_encoder(encoder_id: str, dim: int = 256):
    """Resolve an encoder id: ``hash`` (default) or ``st:<model-name>``."""
    if encoder_id in ("hash", "", None):
        return HashingEncoder(dim=dim)
    if encoder_id.startswith("hash-"):
        return HashingEncoder(dim=int(encoder_id.split("-", 1)[1]))
    if encoder_id.startswith("st:"):
        return SentenceTransformerEncoder(encoder_id[3:])
    raise EncoderError(f"unknown encoder id {encoder_id!r}")
