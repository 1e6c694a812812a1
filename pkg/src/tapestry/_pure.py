"""Pure-Python lane for the hot kernels.

Implements the same surface as the compiled ``_native`` module: the
XSalsa20-Poly1305 secretbox, the proof-of-work nonce search, and the keyed
token-hash expansion.  Selected automatically when the extension is missing
or when TAPESTRY_PURE=1 is set; outputs are byte-identical to the native
lane (the test suite asserts this whenever both lanes are importable).
"""

from __future__ import annotations

import hashlib
import hmac

LANE = "pure"

KEY_BYTES = 32
NONCE_BYTES = 24
MAC_BYTES = 16

_MASK32 = 0xFFFFFFFF
_MASK64 = 0xFFFFFFFFFFFFFFFF

# "expand 32-byte k", the Salsa20 input-block constants
_SIGMA = (0x61707865, 0x3320646E, 0x79622D32, 0x6B206574)


def _rotl(x: int, n: int) -> int:
    return ((x << n) | (x >> (32 - n))) & _MASK32


def _doublerounds(x: list[int]) -> None:
    # 10 double rounds (column round + row round) in place
    for _ in range(10):
        # column round
        x[4] ^= _rotl((x[0] + x[12]) & _MASK32, 7)
        x[8] ^= _rotl((x[4] + x[0]) & _MASK32, 9)
        x[12] ^= _rotl((x[8] + x[4]) & _MASK32, 13)
        x[0] ^= _rotl((x[12] + x[8]) & _MASK32, 18)
        x[9] ^= _rotl((x[5] + x[1]) & _MASK32, 7)
        x[13] ^= _rotl((x[9] + x[5]) & _MASK32, 9)
        x[1] ^= _rotl((x[13] + x[9]) & _MASK32, 13)
        x[5] ^= _rotl((x[1] + x[13]) & _MASK32, 18)
        x[14] ^= _rotl((x[10] + x[6]) & _MASK32, 7)
        x[2] ^= _rotl((x[14] + x[10]) & _MASK32, 9)
        x[6] ^= _rotl((x[2] + x[14]) & _MASK32, 13)
        x[10] ^= _rotl((x[6] + x[2]) & _MASK32, 18)
        x[3] ^= _rotl((x[15] + x[11]) & _MASK32, 7)
        x[7] ^= _rotl((x[3] + x[15]) & _MASK32, 9)
        x[11] ^= _rotl((x[7] + x[3]) & _MASK32, 13)
        x[15] ^= _rotl((x[11] + x[7]) & _MASK32, 18)
        # row round
        x[1] ^= _rotl((x[0] + x[3]) & _MASK32, 7)
        x[2] ^= _rotl((x[1] + x[0]) & _MASK32, 9)
        x[3] ^= _rotl((x[2] + x[1]) & _MASK32, 13)
        x[0] ^= _rotl((x[3] + x[2]) & _MASK32, 18)
        x[6] ^= _rotl((x[5] + x[4]) & _MASK32, 7)
        x[7] ^= _rotl((x[6] + x[5]) & _MASK32, 9)
        x[4] ^= _rotl((x[7] + x[6]) & _MASK32, 13)
        x[5] ^= _rotl((x[4] + x[7]) & _MASK32, 18)
        x[11] ^= _rotl((x[10] + x[9]) & _MASK32, 7)
        x[8] ^= _rotl((x[11] + x[10]) & _MASK32, 9)
        x[9] ^= _rotl((x[8] + x[11]) & _MASK32, 13)
        x[10] ^= _rotl((x[9] + x[8]) & _MASK32, 18)
        x[12] ^= _rotl((x[15] + x[14]) & _MASK32, 7)
        x[13] ^= _rotl((x[12] + x[15]) & _MASK32, 9)
        x[14] ^= _rotl((x[13] + x[12]) & _MASK32, 13)
        x[15] ^= _rotl((x[14] + x[13]) & _MASK32, 18)


def _words(data: bytes) -> list[int]:
    return [int.from_bytes(data[i : i + 4], "little") for i in range(0, len(data), 4)]


def _salsa20_block(key_words: list[int], n0: int, n1: int, counter: int) -> bytes:
    k = key_words
    x = [
        _SIGMA[0], k[0], k[1], k[2],
        k[3], _SIGMA[1], n0, n1,
        counter & _MASK32, (counter >> 32) & _MASK32, _SIGMA[2], k[4],
        k[5], k[6], k[7], _SIGMA[3],
    ]
    z = list(x)
    _doublerounds(z)
    out = bytearray(64)
    for i in range(16):
        out[4 * i : 4 * i + 4] = ((z[i] + x[i]) & _MASK32).to_bytes(4, "little")
    return bytes(out)


def _hsalsa20(key: bytes, inp: bytes) -> bytes:
    # 32-byte subkey from key and 16 input bytes; no feed-forward
    k = _words(key)
    n = _words(inp)
    x = [
        _SIGMA[0], k[0], k[1], k[2],
        k[3], _SIGMA[1], n[0], n[1],
        n[2], n[3], _SIGMA[2], k[4],
        k[5], k[6], k[7], _SIGMA[3],
    ]
    _doublerounds(x)
    out = bytearray(32)
    for j, i in enumerate((0, 5, 10, 15, 6, 7, 8, 9)):
        out[4 * j : 4 * j + 4] = x[i].to_bytes(4, "little")
    return bytes(out)


def _xsalsa20_stream(key: bytes, nonce: bytes, length: int) -> bytes:
    subkey = _hsalsa20(key, nonce[:16])
    kw = _words(subkey)
    n0 = int.from_bytes(nonce[16:20], "little")
    n1 = int.from_bytes(nonce[20:24], "little")
    blocks = bytearray()
    counter = 0
    while len(blocks) < length:
        blocks += _salsa20_block(kw, n0, n1, counter)
        counter += 1
    return bytes(blocks[:length])


def _poly1305(key: bytes, msg: bytes) -> bytes:
    r = int.from_bytes(key[:16], "little") & 0x0FFFFFFC0FFFFFFC0FFFFFFC0FFFFFFF
    s = int.from_bytes(key[16:32], "little")
    p = (1 << 130) - 5
    acc = 0
    for i in range(0, len(msg), 16):
        block = msg[i : i + 16] + b"\x01"
        acc = ((acc + int.from_bytes(block, "little")) * r) % p
    return ((acc + s) & ((1 << 128) - 1)).to_bytes(16, "little")


def secretbox_seal(key: bytes, nonce: bytes, plaintext: bytes) -> bytes:
    """XSalsa20-Poly1305 seal; returns mac(16) || cipher."""
    if len(key) != KEY_BYTES or len(nonce) != NONCE_BYTES:
        raise ValueError("bad key or nonce length")
    stream = _xsalsa20_stream(key, nonce, 32 + len(plaintext))
    cipher = bytes(a ^ b for a, b in zip(plaintext, stream[32:]))
    mac = _poly1305(stream[:32], cipher)
    return mac + cipher


def secretbox_open(key: bytes, nonce: bytes, boxed: bytes) -> bytes:
    """Open a secretbox; raises ValueError on authentication failure."""
    if len(key) != KEY_BYTES or len(nonce) != NONCE_BYTES:
        raise ValueError("bad key or nonce length")
    if len(boxed) < MAC_BYTES:
        raise ValueError("box shorter than its authentication tag")
    mac, cipher = boxed[:MAC_BYTES], boxed[MAC_BYTES:]
    stream = _xsalsa20_stream(key, nonce, 32 + len(cipher))
    expected = _poly1305(stream[:32], cipher)
    if not hmac.compare_digest(mac, expected):
        raise ValueError("authentication failed")
    return bytes(a ^ b for a, b in zip(cipher, stream[32:]))


def _leading_zero_bits(digest: bytes) -> int:
    value = int.from_bytes(digest, "big")
    return 256 - value.bit_length()


def pow_search(prefix: bytes, difficulty_bits: int, start_nonce: int, max_iters: int):
    """Scan nonces from start_nonce; return the first whose SHA-256(prefix ||
    nonce_be8) has >= difficulty_bits leading zero bits, or None."""
    base = hashlib.sha256(prefix)
    nonce = start_nonce & _MASK64
    for _ in range(max_iters):
        h = base.copy()
        h.update(nonce.to_bytes(8, "big"))
        if _leading_zero_bits(h.digest()) >= difficulty_bits:
            return nonce
        nonce = (nonce + 1) & _MASK64
    return None


def token_material(seed: bytes, tokens: list[bytes], nbytes_per_token: int) -> bytes:
    """Keyed BLAKE2b expansion: per token, 64-byte blocks of
    blake2b(key=seed, data=token || counter_be4), truncated to the
    requested per-token size and concatenated in token order."""
    if len(seed) != KEY_BYTES:
        raise ValueError("seed must be 32 bytes")
    blocks = (nbytes_per_token + 63) // 64
    out = bytearray()
    for token in tokens:
        material = bytearray()
        for counter in range(blocks):
            h = hashlib.blake2b(key=seed, digest_size=64)
            h.update(token)
            h.update(counter.to_bytes(4, "big"))
            material += h.digest()
        out += material[:nbytes_per_token]
    return bytes(out)
