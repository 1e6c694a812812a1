"""Deterministic embeddings: construction oracle, norms, cache coherence."""

from __future__ import annotations

import hashlib

import numpy as np
import pytest

from tapestry.analysis.embedding import (
    DEFAULT_EMBED_SEED,
    EMBEDDING_DIM,
    HashEmbedder,
    embed_activity,
)

# sha256 of the float64 bytes of the "alpha" token vector, frozen from the
# standalone construction script
ALPHA_VECTOR_SHA256 = "ce6b20de6e815b5604d61d8bb7be60a5b7759aaed99934fb7dc91bfe917513e0"


def standalone_token_vector(token: str, seed: bytes, dim: int = 64) -> np.ndarray:
    """Independent re-implementation of the construction (hashlib only)."""
    blocks = (4 * dim + 63) // 64
    material = b"".join(
        hashlib.blake2b(token.encode() + c.to_bytes(4, "big"),
                        key=seed, digest_size=64).digest()
        for c in range(blocks)
    )[: 4 * dim]
    words = np.frombuffer(material, dtype=">u4").astype(np.float64)
    v = words / 2147483648.0 - 1.0
    return v / np.linalg.norm(v)


class TestTokenVectors:
    def test_matches_standalone_construction(self, embedder):
        got = embedder.token_vector("alpha")
        expected = standalone_token_vector("alpha", DEFAULT_EMBED_SEED)
        assert (got == expected).all()
        assert hashlib.sha256(got.tobytes()).hexdigest() == ALPHA_VECTOR_SHA256

    def test_unit_norm(self, embedder):
        for token in ("alpha", "beta", "12x"):
            assert np.linalg.norm(embedder.token_vector(token)) == pytest.approx(1.0, abs=1e-9)

    def test_distinct_tokens_distinct_vectors(self, embedder):
        assert not (embedder.token_vector("alpha") == embedder.token_vector("beta")).all()

    def test_seed_changes_vectors(self):
        a = HashEmbedder(seed=bytes(32)).token_vector("alpha")
        b = HashEmbedder(seed=bytes([1]) * 32).token_vector("alpha")
        assert not (a == b).all()


class TestActivityEmbedding:
    def test_repeated_token_equals_single(self, embedder):
        single = embed_activity(["alpha"], embedder)
        repeated = embed_activity(["alpha"] * 5, embedder)
        assert (single == repeated).all()

    def test_empty_tokens_zero_vector(self, embedder):
        out = embed_activity([], embedder)
        assert out.shape == (EMBEDDING_DIM,)
        assert (out == 0).all()

    def test_norm_is_zero_or_one(self, embedder):
        for tokens in ([], ["alpha"], ["alpha", "beta", "gamma"]):
            norm = np.linalg.norm(embed_activity(tokens, embedder))
            assert norm == pytest.approx(0.0, abs=1e-6) or norm == pytest.approx(1.0, abs=1e-6)

    def test_determinism_across_instances(self):
        a = HashEmbedder().embed_tokens(["alpha", "beta"])
        b = HashEmbedder().embed_tokens(["alpha", "beta"])
        assert (a == b).all()

    def test_batch_path_matches_single_path(self, embedder):
        fresh = HashEmbedder()
        batch = fresh.embed_tokens(["gamma", "delta", "gamma"])
        total = (embedder.token_vector("gamma") * 2 + embedder.token_vector("delta")) / 3
        expected = total / np.linalg.norm(total)
        np.testing.assert_allclose(batch, expected, atol=1e-12)

    def test_custom_dimension(self):
        small = HashEmbedder(dim=16)
        assert small.embed_tokens(["alpha"]).shape == (16,)
