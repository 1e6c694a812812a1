"""Identity key pairs, PRF key derivation, signing, authenticated encryption.

Primitives are fixed: Ed25519 for signatures, keyed BLAKE2b-256 as the PRF,
XSalsa20-Poly1305 for the sealed boxes (wrong-key detection comes from the
Poly1305 tag), SHA-256 elsewhere.  All operations are pure functions over
value inputs; identity material is immutable after creation.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from tapestry import kernels
from tapestry.errors import InvalidInput, InvalidScope, InvalidSeed, Malformed, WrongKey

SEED_BYTES = 32
KEY_BYTES = 32
NONCE_BYTES = 24
SIGNATURE_BYTES = 64

#: width of one key-derivation time bucket, in seconds (whole UTC days)
DAY_SECONDS = 86400

# domain separator: PRF seed derived from an explicit identity seed
_PRF_SEED_TAG = b"tapestry.prf-seed"


def day_index(time_s: int, bucket_seconds: int = DAY_SECONDS) -> int:
    """Bucket a Unix timestamp into whole buckets since the epoch (UTC)."""
    return int(time_s) // bucket_seconds


@dataclass(frozen=True)
class SubjectIdentity:
    """A subject's key material. ``sk`` and ``seed`` never leave the subject."""

    pk: bytes    # 32-byte Ed25519 verification key
    sk: bytes    # 32-byte Ed25519 signing seed
    seed: bytes  # 32-byte PRF seed


@dataclass(frozen=True)
class KeyScope:
    """The (identity, day, activity type[, count]) a derived key covers."""

    pk: bytes
    day_index: int
    activity_type: str
    count: int | None = None


@dataclass(frozen=True)
class DerivedKey:
    ek: bytes
    scope: KeyScope


@dataclass(frozen=True)
class SealedBox:
    nonce: bytes       # 24 bytes
    ciphertext: bytes  # 16-byte tag || cipher


def generate_identity(rng_seed: bytes | None = None) -> SubjectIdentity:
    """Create a fresh identity; a 32-byte rng_seed makes it deterministic.

    A subject may hold any number of independent identities.
    """
    if rng_seed is not None:
        if not isinstance(rng_seed, (bytes, bytearray)) or len(rng_seed) != SEED_BYTES:
            raise InvalidSeed("rng_seed must be exactly 32 bytes")
        sk = bytes(rng_seed)
        prf_seed = hashlib.blake2b(_PRF_SEED_TAG, key=sk, digest_size=32).digest()
    else:
        sk = os.urandom(SEED_BYTES)
        prf_seed = os.urandom(SEED_BYTES)
    pk = (
        Ed25519PrivateKey.from_private_bytes(sk)
        .public_key()
        .public_bytes(Encoding.Raw, PublicFormat.Raw)
    )
    return SubjectIdentity(pk=pk, sk=sk, seed=prf_seed)


def _prf(seed: bytes, data: bytes) -> bytes:
    return hashlib.blake2b(data, key=seed, digest_size=32).digest()


def derive_key(
    seed: bytes,
    pk: bytes,
    day: int,
    activity_type: str,
    count: int | None = None,
) -> DerivedKey:
    """Derive the symmetric key for one (identity, day, type[, count]) scope.

    Two nested keyed-BLAKE2b applications over a fixed byte layout:
    inner = PRF(seed, pk || day_be8), ek = PRF(seed, inner || type_utf8),
    and optionally ek' = PRF(seed, ek || count_be8) for per-item keys.
    Deterministic, so the subject can re-derive any key on demand.
    """
    if not activity_type:
        raise InvalidScope("activity_type must be non-empty")
    if day < 0:
        raise InvalidScope("day index must be >= 0")
    if len(seed) != SEED_BYTES or len(pk) != KEY_BYTES:
        raise InvalidInput("seed and pk must be 32 bytes")
    inner = _prf(seed, pk + day.to_bytes(8, "big"))
    ek = _prf(seed, inner + activity_type.encode("utf-8"))
    if count is not None:
        if count < 0:
            raise InvalidScope("count must be >= 0")
        ek = _prf(seed, ek + count.to_bytes(8, "big"))
    return DerivedKey(ek=ek, scope=KeyScope(pk, day, activity_type, count))


def sign(sk: bytes, message: bytes) -> bytes:
    if len(sk) != SEED_BYTES:
        raise InvalidInput("signing key must be 32 bytes")
    return Ed25519PrivateKey.from_private_bytes(sk).sign(message)


def verify_signature(pk: bytes, message: bytes, signature: bytes) -> bool:
    if len(pk) != KEY_BYTES or len(signature) != SIGNATURE_BYTES:
        raise InvalidInput("pk must be 32 bytes and signature 64 bytes")
    try:
        Ed25519PublicKey.from_public_bytes(pk).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False


def seal(ek: bytes, plaintext: bytes, nonce: bytes | None = None) -> SealedBox:
    """Encrypt-and-authenticate under a derived key.

    Nonces are random per call; passing one explicitly is for
    deterministic fixtures only.
    """
    if len(ek) != KEY_BYTES:
        raise InvalidInput("key must be 32 bytes")
    if nonce is None:
        nonce = os.urandom(NONCE_BYTES)
    elif len(nonce) != NONCE_BYTES:
        raise Malformed("nonce must be exactly 24 bytes")
    return SealedBox(nonce=nonce, ciphertext=kernels.secretbox_seal(ek, nonce, plaintext))


def open_box(ek: bytes, box: SealedBox) -> bytes:
    """Open a sealed box; any key other than the sealing key fails detectably."""
    if len(ek) != KEY_BYTES:
        raise InvalidInput("key must be 32 bytes")
    if len(box.nonce) != NONCE_BYTES:
        raise Malformed("nonce must be exactly 24 bytes")
    if len(box.ciphertext) < kernels.MAC_BYTES:
        raise Malformed("ciphertext shorter than its authentication tag")
    try:
        return kernels.secretbox_open(ek, box.nonce, box.ciphertext)
    except ValueError as exc:
        raise WrongKey("decryption failed: wrong key or tampered box") from exc


# --- identity files ---------------------------------------------------------

def identity_to_json(identity: SubjectIdentity) -> str:
    return json.dumps(
        {"pk": identity.pk.hex(), "sk": identity.sk.hex(), "seed": identity.seed.hex()},
        indent=2,
    )


def identity_from_json(text: str) -> SubjectIdentity:
    raw = json.loads(text)
    return SubjectIdentity(
        pk=bytes.fromhex(raw["pk"]),
        sk=bytes.fromhex(raw["sk"]),
        seed=bytes.fromhex(raw["seed"]),
    )


def save_identity(identity: SubjectIdentity, path: str | Path) -> None:
    Path(path).write_text(identity_to_json(identity))


def load_identity(path: str | Path) -> SubjectIdentity:
    return identity_from_json(Path(path).read_text())
