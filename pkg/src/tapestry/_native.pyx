# cython: language_level=3, boundscheck=False, wraparound=False
"""libsodium-backed lane for the hot kernels.

Same surface as ``_pure``: secretbox seal/open (XSalsa20-Poly1305),
proof-of-work nonce search over an incremental SHA-256 state, and batched
keyed BLAKE2b token expansion.
"""

from libc.stdint cimport uint8_t, uint32_t, uint64_t
from cpython.bytes cimport PyBytes_FromStringAndSize

cdef extern from "sodium.h" nogil:
    int sodium_init()

    int crypto_secretbox_easy(unsigned char *c, const unsigned char *m,
                              unsigned long long mlen,
                              const unsigned char *n, const unsigned char *k)
    int crypto_secretbox_open_easy(unsigned char *m, const unsigned char *c,
                                   unsigned long long clen,
                                   const unsigned char *n, const unsigned char *k)

    ctypedef struct crypto_hash_sha256_state:
        uint32_t state[8]
        uint64_t count
        uint8_t  buf[64]
    int crypto_hash_sha256_init(crypto_hash_sha256_state *state)
    int crypto_hash_sha256_update(crypto_hash_sha256_state *state,
                                  const unsigned char *in_, unsigned long long inlen)
    int crypto_hash_sha256_final(crypto_hash_sha256_state *state, unsigned char *out)

    ctypedef struct crypto_generichash_state:
        pass
    size_t crypto_generichash_statebytes()
    int crypto_generichash_init(crypto_generichash_state *state,
                                const unsigned char *key, size_t keylen, size_t outlen)
    int crypto_generichash_update(crypto_generichash_state *state,
                                  const unsigned char *in_, unsigned long long inlen)
    int crypto_generichash_final(crypto_generichash_state *state,
                                 unsigned char *out, size_t outlen)

from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

LANE = "native"

KEY_BYTES = 32
NONCE_BYTES = 24
MAC_BYTES = 16

if sodium_init() < 0:
    raise ImportError("sodium_init() failed")


def secretbox_seal(bytes key, bytes nonce, bytes plaintext):
    """XSalsa20-Poly1305 seal; returns mac(16) || cipher."""
    if len(key) != 32 or len(nonce) != 24:
        raise ValueError("bad key or nonce length")
    cdef const unsigned char *m = plaintext
    cdef Py_ssize_t mlen = len(plaintext)
    out = PyBytes_FromStringAndSize(NULL, mlen + 16)
    cdef unsigned char *c = <unsigned char *><char *>out
    crypto_secretbox_easy(c, m, <unsigned long long>mlen,
                          <const unsigned char *><char *>nonce,
                          <const unsigned char *><char *>key)
    return out


def secretbox_open(bytes key, bytes nonce, bytes boxed):
    """Open a secretbox; raises ValueError on authentication failure."""
    if len(key) != 32 or len(nonce) != 24:
        raise ValueError("bad key or nonce length")
    cdef Py_ssize_t clen = len(boxed)
    if clen < 16:
        raise ValueError("box shorter than its authentication tag")
    out = PyBytes_FromStringAndSize(NULL, clen - 16)
    cdef unsigned char *m = <unsigned char *><char *>out
    cdef int rc = crypto_secretbox_open_easy(
        m, <const unsigned char *><char *>boxed, <unsigned long long>clen,
        <const unsigned char *><char *>nonce,
        <const unsigned char *><char *>key)
    if rc != 0:
        raise ValueError("authentication failed")
    return out


cdef inline int _leading_zero_bits(const unsigned char *digest) nogil:
    cdef int bits = 0
    cdef int i
    cdef unsigned char byte
    for i in range(32):
        byte = digest[i]
        if byte == 0:
            bits += 8
            continue
        while (byte & 0x80) == 0:
            bits += 1
            byte = <unsigned char>(byte << 1)
        break
    return bits


def pow_search(bytes prefix, int difficulty_bits, object start_nonce, object max_iters):
    """Scan nonces from start_nonce; return the first whose SHA-256(prefix ||
    nonce_be8) has >= difficulty_bits leading zero bits, or None."""
    cdef crypto_hash_sha256_state base, st
    cdef unsigned char digest[32]
    cdef unsigned char nbuf[8]
    cdef uint64_t nonce = <uint64_t>int(start_nonce)
    cdef uint64_t iters = <uint64_t>int(max_iters)
    cdef uint64_t i
    cdef int found = 0
    crypto_hash_sha256_init(&base)
    crypto_hash_sha256_update(&base, <const unsigned char *><char *>prefix,
                              <unsigned long long>len(prefix))
    with nogil:
        for i in range(iters):
            st = base
            nbuf[0] = <unsigned char>(nonce >> 56)
            nbuf[1] = <unsigned char>(nonce >> 48)
            nbuf[2] = <unsigned char>(nonce >> 40)
            nbuf[3] = <unsigned char>(nonce >> 32)
            nbuf[4] = <unsigned char>(nonce >> 24)
            nbuf[5] = <unsigned char>(nonce >> 16)
            nbuf[6] = <unsigned char>(nonce >> 8)
            nbuf[7] = <unsigned char>nonce
            crypto_hash_sha256_update(&st, nbuf, 8)
            crypto_hash_sha256_final(&st, digest)
            if _leading_zero_bits(digest) >= difficulty_bits:
                found = 1
                break
            nonce += 1
    if found:
        return int(nonce)
    return None


def token_material(bytes seed, list tokens, Py_ssize_t nbytes_per_token):
    """Keyed BLAKE2b expansion matching the pure lane byte for byte."""
    if len(seed) != 32:
        raise ValueError("seed must be 32 bytes")
    cdef Py_ssize_t nblocks = (nbytes_per_token + 63) // 64
    cdef Py_ssize_t ntokens = len(tokens)
    out = PyBytes_FromStringAndSize(NULL, ntokens * nbytes_per_token)
    cdef unsigned char *dst = <unsigned char *><char *>out
    cdef size_t statebytes = crypto_generichash_statebytes()
    cdef crypto_generichash_state *st = <crypto_generichash_state *>malloc(statebytes)
    if st == NULL:
        raise MemoryError()
    cdef unsigned char block[64]
    cdef unsigned char ctr[4]
    cdef const unsigned char *key = <const unsigned char *><char *>seed
    cdef Py_ssize_t ti, bi, take, off
    cdef bytes token
    cdef uint32_t counter
    try:
        for ti in range(ntokens):
            token = tokens[ti]
            off = ti * nbytes_per_token
            for bi in range(nblocks):
                counter = <uint32_t>bi
                ctr[0] = <unsigned char>(counter >> 24)
                ctr[1] = <unsigned char>(counter >> 16)
                ctr[2] = <unsigned char>(counter >> 8)
                ctr[3] = <unsigned char>counter
                crypto_generichash_init(st, key, 32, 64)
                crypto_generichash_update(st, <const unsigned char *><char *>token,
                                          <unsigned long long>len(token))
                crypto_generichash_update(st, ctr, 4)
                crypto_generichash_final(st, block, 64)
                take = nbytes_per_token - bi * 64
                if take > 64:
                    take = 64
                memcpy(dst + off + bi * 64, block, take)
    finally:
        free(st)
    return out
