"""TREM embedding file format.

Little-endian binary: header ``magic "TREM", version u32, count u64,
dim u32``, then per record ``key length u16, UTF-8 key bytes,
dim x float32``. The same layout serves sentence embeddings (keys
``<doc_id>#<sentence_index>``) and word embeddings (keys are vocabulary
terms). Vectors are stored in single precision; similarity accumulation
elsewhere happens in double precision.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from trait.errors import EmbeddingFormatError

TREM_MAGIC = b"TREM"
TREM_VERSION = 1
_HEADER = struct.Struct("<4sIQI")
_KEYLEN = struct.Struct("<H")


@dataclass
class EmbeddingTable:
    dim: int
    keys: list
    vectors: np.ndarray  # float32, shape (count, dim)
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {k: i for i, k in enumerate(self.keys)}

    def __len__(self):
        return len(self.keys)

    def __contains__(self, key):
        return key in self.index

    def get(self, key):
        row = self.index.get(key)
        return None if row is None else self.vectors[row]

    def rows_for(self, keys):
        """Row indices for the given keys; KeyError on a missing key."""
        return np.array([self.index[k] for k in keys], dtype=np.int64)


def save_trem(path, keys, vectors) -> None:
    vectors = np.ascontiguousarray(vectors, dtype=np.float32)
    if vectors.ndim != 2 or len(keys) != vectors.shape[0]:
        raise EmbeddingFormatError("keys and vectors disagree in length")
    dim = vectors.shape[1]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(TREM_MAGIC, TREM_VERSION, len(keys), dim))
        for key, vec in zip(keys, vectors):
            raw = key.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise EmbeddingFormatError(f"key too long: {key[:32]!r}...")
            fh.write(_KEYLEN.pack(len(raw)))
            fh.write(raw)
            fh.write(vec.tobytes())


def load_trem(path) -> EmbeddingTable:
    """Load and validate a TREM file.

    Validation: magic and version, record count, consistent dimension,
    finite vectors with positive norm, no trailing bytes.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise EmbeddingFormatError(f"{path}: truncated header")
    magic, version, count, dim = _HEADER.unpack_from(data, 0)
    if magic != TREM_MAGIC:
        raise EmbeddingFormatError(f"{path}: bad magic {magic!r}")
    if version != TREM_VERSION:
        raise EmbeddingFormatError(f"{path}: unsupported version {version}")
    if dim <= 0:
        raise EmbeddingFormatError(f"{path}: non-positive dimension {dim}")

    offset = _HEADER.size
    rec_bytes = 4 * dim
    keys = []
    vectors = np.empty((count, dim), dtype=np.float32)
    for r in range(count):
        if offset + _KEYLEN.size > len(data):
            raise EmbeddingFormatError(f"{path}: truncated at record {r}")
        (klen,) = _KEYLEN.unpack_from(data, offset)
        offset += _KEYLEN.size
        if offset + klen + rec_bytes > len(data):
            raise EmbeddingFormatError(f"{path}: truncated at record {r}")
        try:
            key = data[offset : offset + klen].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EmbeddingFormatError(f"{path}: record {r} key is not UTF-8") from exc
        offset += klen
        vectors[r] = np.frombuffer(data, dtype="<f4", count=dim, offset=offset)
        offset += rec_bytes
        keys.append(key)
    if offset != len(data):
        raise EmbeddingFormatError(f"{path}: {len(data) - offset} trailing bytes")
    if len(set(keys)) != len(keys):
        raise EmbeddingFormatError(f"{path}: duplicate keys")
    if count and not np.all(np.isfinite(vectors)):
        raise EmbeddingFormatError(f"{path}: non-finite vector components")
    if count:
        norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
        if np.any(norms <= 0.0):
            bad = keys[int(np.argmin(norms))]
            raise EmbeddingFormatError(f"{path}: zero-norm vector for key {bad!r}")
    return EmbeddingTable(dim=dim, keys=keys, vectors=vectors)
