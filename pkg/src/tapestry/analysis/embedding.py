"""Deterministic activity embeddings.

Tokens map to fixed pseudo-random unit vectors through a seeded keyed-hash
expansion; an activity embeds as the L2-normalised mean of its token
vectors.  The embedder sits behind a tiny interface so a learned model can
replace it without touching the evidence pipeline: anything with
``dim`` and ``embed_tokens(tokens) -> vector`` works.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Protocol

import numpy as np

from tapestry import kernels

EMBEDDING_DIM = 64

#: default embedder seed, shared by every tool in this package so evidence
#: stays comparable across sessions and machines
DEFAULT_EMBED_SEED = hashlib.sha256(b"tapestry.embedder.v1").digest()


class Embedder(Protocol):
    dim: int

    def embed_tokens(self, tokens: list[str]) -> np.ndarray: ...


def _normalize(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return vec
    return vec / norm


class HashEmbedder:
    """Reference embedder: seeded hash expansion, no training required.

    Per token: 4*dim bytes of keyed BLAKE2b material, read as big-endian
    uint32 words, affinely mapped onto [-1, 1), then L2-normalised.  A
    small cache makes repeated tokens cheap.
    """

    def __init__(self, dim: int = EMBEDDING_DIM, seed: bytes = DEFAULT_EMBED_SEED) -> None:
        if len(seed) != 32:
            raise ValueError("embedder seed must be 32 bytes")
        self.dim = dim
        self.seed = seed
        self._cache: dict[str, np.ndarray] = {}

    def token_vector(self, token: str) -> np.ndarray:
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        material = kernels.token_material(self.seed, [token.encode("utf-8")], 4 * self.dim)
        words = np.frombuffer(material, dtype=">u4").astype(np.float64)
        vec = _normalize(words / 2147483648.0 - 1.0)
        self._cache[token] = vec
        return vec

    def embed_tokens(self, tokens: list[str]) -> np.ndarray:
        """Mean of token vectors, renormalised; zero vector for no tokens.

        Computed as a count-weighted sum over sorted unique tokens, so the
        result is independent of token order and exactly equals the token
        vector when every token is the same.
        """
        if not tokens:
            return np.zeros(self.dim)
        counts: dict[str, int] = {}
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
        fresh = [t.encode("utf-8") for t in sorted(counts) if t not in self._cache]
        if fresh:
            material = kernels.token_material(self.seed, fresh, 4 * self.dim)
            words = np.frombuffer(material, dtype=">u4").astype(np.float64)
            words = words.reshape(len(fresh), self.dim) / 2147483648.0 - 1.0
            for raw, row in zip(fresh, words):
                self._cache[raw.decode("utf-8")] = _normalize(row)
        n = len(tokens)
        total = np.zeros(self.dim)
        for token in sorted(counts):
            total += self._cache[token] * (counts[token] / n)
        return _normalize(total)


def embed_activity(tokens: list[str], embedder: Embedder | None = None) -> np.ndarray:
    if embedder is None:
        embedder = HashEmbedder()
    return embedder.embed_tokens(tokens)


def embed_texts(texts: Iterable[str], embedder: Embedder | None = None) -> np.ndarray:
    """Preprocess and embed a batch of raw texts into an (n, dim) array."""
    from tapestry.analysis.text import preprocess

    if embedder is None:
        embedder = HashEmbedder()
    rows = [embedder.embed_tokens(preprocess(text)) for text in texts]
    if not rows:
        return np.zeros((0, embedder.dim))
    return np.stack(rows)
