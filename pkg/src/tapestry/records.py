"""The trust-evidence record: canonical bytes, addressing, hashing, wire form.

A record carries plaintext metadata (identity, timestamp, activity type,
optional tags), a sealed embedding vector, and a signature over the whole
canonical encoding.  Two digests address it: the metadata hash is its unique
id in the lake and on the ledger; the hash of the sealed payload is the
value anchored under that id.  The canonical byte layout is documented in
docs/formats.md.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

import numpy as np

from tapestry import crypto
from tapestry.crypto import SealedBox, SubjectIdentity
from tapestry.errors import InvalidInput

#: embedding width sealed into every record (little-endian float32 each)
EMBEDDING_DIM = 64

DIGEST_BYTES = 32


@dataclass(frozen=True)
class TrustEvidence:
    pk: bytes            # 32-byte public identity
    time: int            # Unix seconds UTC, > 0
    activity_type: str   # e.g. "twitter.text"
    cdata: SealedBox     # sealed embedding vector
    tags: tuple[str, ...] = ()
    sigma: bytes = b""   # 64-byte signature over canonical bytes


def encode_embedding(vector) -> bytes:
    """Serialize a real vector as little-endian float32."""
    arr = np.asarray(vector, dtype=np.float32)
    if arr.ndim != 1:
        raise InvalidInput("embedding must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("embedding must be finite-valued")
    return arr.astype("<f4").tobytes()


def decode_embedding(data: bytes) -> np.ndarray:
    if len(data) % 4 != 0:
        raise InvalidInput("embedding payload length must be a multiple of 4")
    return np.frombuffer(data, dtype="<f4").astype(np.float64)


def _encode_str(out: bytearray, text: str) -> None:
    raw = text.encode("utf-8")
    out += len(raw).to_bytes(4, "big")
    out += raw


def canonical_bytes(te: TrustEvidence, include_cdata: bool = True) -> bytes:
    """Injective deterministic encoding of a record.

    With include_cdata=False this is the metadata-only form whose SHA-256
    is the record's id; with True it is the signing payload.
    """
    if te.time <= 0:
        raise InvalidInput("time must be strictly positive")
    if not te.activity_type:
        raise InvalidInput("activity_type must be non-empty")
    if len(te.pk) != 32:
        raise InvalidInput("pk must be 32 bytes")
    out = bytearray()
    out += te.pk
    out += int(te.time).to_bytes(8, "big")
    _encode_str(out, te.activity_type)
    out += len(te.tags).to_bytes(4, "big")
    for tag in te.tags:
        _encode_str(out, tag)
    if include_cdata:
        out += te.cdata.nonce
        out += len(te.cdata.ciphertext).to_bytes(4, "big")
        out += te.cdata.ciphertext
    return bytes(out)


def evidence_id(te: TrustEvidence) -> bytes:
    """SHA-256 of the metadata form; the record's unique id."""
    return hashlib.sha256(canonical_bytes(te, include_cdata=False)).digest()


def evidence_hash(te: TrustEvidence) -> bytes:
    """SHA-256 of the sealed payload (nonce || ciphertext); the anchored value."""
    return hashlib.sha256(te.cdata.nonce + te.cdata.ciphertext).digest()


def make_evidence(
    identity: SubjectIdentity,
    time: int,
    activity_type: str,
    embedding,
    tags: tuple[str, ...] = (),
    count: int | None = None,
    nonce: bytes | None = None,
) -> TrustEvidence:
    """Seal an embedding under the (day, type) key and sign the record."""
    key = crypto.derive_key(
        identity.seed, identity.pk, crypto.day_index(time), activity_type, count
    )
    box = crypto.seal(key.ek, encode_embedding(embedding), nonce=nonce)
    te = TrustEvidence(
        pk=identity.pk,
        time=int(time),
        activity_type=activity_type,
        cdata=box,
        tags=tuple(tags),
    )
    sigma = crypto.sign(identity.sk, canonical_bytes(te, include_cdata=True))
    return replace(te, sigma=sigma)


def verify_evidence_signature(te: TrustEvidence) -> bool:
    return crypto.verify_signature(te.pk, canonical_bytes(te, include_cdata=True), te.sigma)


# --- JSON wire form ---------------------------------------------------------

def te_to_wire(te: TrustEvidence) -> dict:
    return {
        "pk": te.pk.hex(),
        "time": te.time,
        "type": te.activity_type,
        "tags": list(te.tags),
        "nonce": te.cdata.nonce.hex(),
        "ciphertext": te.cdata.ciphertext.hex(),
        "sigma": te.sigma.hex(),
    }


def te_from_wire(raw: dict) -> TrustEvidence:
    try:
        return TrustEvidence(
            pk=bytes.fromhex(raw["pk"]),
            time=int(raw["time"]),
            activity_type=raw["type"],
            cdata=SealedBox(
                nonce=bytes.fromhex(raw["nonce"]),
                ciphertext=bytes.fromhex(raw["ciphertext"]),
            ),
            tags=tuple(raw.get("tags") or ()),
            sigma=bytes.fromhex(raw["sigma"]),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidInput(f"malformed trust-evidence wire object: {exc}") from exc


def te_to_json(te: TrustEvidence) -> str:
    return json.dumps(te_to_wire(te), sort_keys=True, separators=(",", ":"))


def te_from_json(text: str) -> TrustEvidence:
    return te_from_wire(json.loads(text))
