"""Deterministic trigram-hash embeddings standing in for a trained two-tower model.

Each character trigram of the lowercased text is hashed (64-bit FNV-1a) into
one of d buckets; bucket weights are accumulated and the vector is
L2-normalized. The two tower sides share the bucket hash, so overlapping
trigrams land in the same dimensions and text overlap drives cosine
similarity, but each side perturbs the per-trigram weight with its own salt,
so the towers are distinct functions. Empty or all-whitespace text maps to
the basis vector e_0.

No training happens here; real deployments would swap in model-produced
vectors via load_embeddings.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path

import numpy as np

from .corpus import Document
from .errors import DimensionMismatch, MalformedLine

DEFAULT_DIM = 64

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

# Per-side weight salts. The bucket hash is unsalted so both towers agree on
# where a trigram lands; salts only modulate how much it contributes.
_SIDE_SALT = {"QueryTower": b"q-tower:1|", "DocTower": b"d-tower:1|"}
_WEIGHT_SPREAD = 0.25


class Side(str, Enum):
    QUERY = "QueryTower"
    DOC = "DocTower"


def _fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _basis_vector(d: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.float64)
    v[0] = 1.0
    return v


def embed_text(text: str, side: Side = Side.QUERY, d: int = DEFAULT_DIM) -> np.ndarray:
    """Embed text into a unit-norm float64 vector of dimension d (d >= 8).

    Deterministic across processes and platforms: fixed hash function, fixed
    salt constants, no randomness.
    """
    if d < 8:
        raise ValueError(f"dimension {d} too small, need d >= 8")
    side = Side(side)
    lowered = text.lower()
    if not lowered.strip():
        return _basis_vector(d)
    n_grams = len(lowered) - 2
    if n_grams <= 0:
        return _basis_vector(d)
    salt = _SIDE_SALT[side.value]
    v = np.zeros(d, dtype=np.float64)
    for i in range(n_grams):
        gram = lowered[i : i + 3].encode("utf-8")
        bucket = _fnv1a(gram) % d
        # Map the salted hash to [-1, 1) and use it to spread weights per side.
        jitter = ((_fnv1a(salt + gram) >> 11) / float(1 << 53)) * 2.0 - 1.0
        v[bucket] += 1.0 + _WEIGHT_SPREAD * jitter
    return v / np.linalg.norm(v)


def embed_document(doc: Document, d: int = DEFAULT_DIM) -> np.ndarray:
    """Embed a document as embed_text(title + " " + description, DocTower, d)."""
    return embed_text(doc.title + " " + doc.description, Side.DOC, d)


def embed_corpus(docs, d: int = DEFAULT_DIM) -> dict[str, np.ndarray]:
    return {doc.doc_id: embed_document(doc, d) for doc in docs}


def load_embeddings(path: str | Path) -> dict[str, np.ndarray]:
    """Read lines of `doc_id<TAB>v1,v2,...,vd`; vectors are renormalized on load.

    All vectors must share one dimension. A zero vector falls back to e_0,
    matching the embed_text zero guard.
    """
    path = Path(path)
    out: dict[str, np.ndarray] = {}
    dim: int | None = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise MalformedLine(str(path), line_no, "expected doc_id<TAB>values")
            doc_id, values = parts
            try:
                v = np.array([float(x) for x in values.split(",")], dtype=np.float64)
            except ValueError as exc:
                raise MalformedLine(str(path), line_no, f"bad vector value: {exc}") from exc
            if not np.all(np.isfinite(v)):
                raise MalformedLine(str(path), line_no, "non-finite vector component")
            if dim is None:
                dim = v.size
            elif v.size != dim:
                raise DimensionMismatch(
                    f"{path}:{line_no}: dimension {v.size} != {dim}"
                )
            norm = np.linalg.norm(v)
            out[doc_id] = v / norm if norm > 0 else _basis_vector(v.size)
    return out


def save_embeddings(embeddings: dict[str, np.ndarray], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc_id, v in embeddings.items():
            fh.write(doc_id)
            fh.write("\t")
            fh.write(",".join(repr(float(x)) for x in v))
            fh.write("\n")
