"""TREM embedding file writer.

Little-endian binary: header ``magic "TREM", version u32, count u64,
dim u32``, then per record ``key length u16, UTF-8 key bytes,
dim x float32``. This mirrors the engine's published layout bit for bit;
files are written atomically (temp file, then rename).
"""

import os
import struct
import tempfile

import numpy as np

TREM_MAGIC = b"TREM"
TREM_VERSION = 1
_HEADER = struct.Struct("<4sIQI")
_KEYLEN = struct.Struct("<H")


def write_trem(path, keys, vectors) -> None:
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2 or vectors.shape[0] != len(keys):
        raise ValueError("keys and vectors disagree in length")
    dim = int(vectors.shape[1])
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_HEADER.pack(TREM_MAGIC, TREM_VERSION, len(keys), dim))
            for key, vec in zip(keys, vectors):
                raw = key.encode("utf-8")
                if len(raw) > 0xFFFF:
                    raise ValueError(f"key too long: {key[:32]!r}...")
                fh.write(_KEYLEN.pack(len(raw)))
                fh.write(raw)
                fh.write(vec.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
