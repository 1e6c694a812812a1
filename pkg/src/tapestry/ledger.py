"""Embedded append-only proof-of-work chain.

Each block seals a batch of (evidence id -> evidence hash) pairs under a
leading-zero-bits SHA-256 difficulty target.  Single-node: commits go
through one writer lock, while fetch/validate read an append-only block
list and therefore only ever observe fully appended blocks.  Persistence
is pluggable (in-memory, or an append-only file of length-prefixed
canonical block bytes).
"""

from __future__ import annotations

import hashlib
import threading
import time as _time
from dataclasses import dataclass, replace as _replace
from pathlib import Path

from tapestry import kernels
from tapestry.errors import DuplicateEntry, EmptyCommit, InvalidInput, NotFound

GENESIS_PREV_HASH = bytes(32)

#: cap on nonce candidates per mining call; far beyond any sane difficulty here
MAX_MINE_ITERS = 1 << 40


@dataclass(frozen=True)
class LedgerEntry:
    id: bytes  # 32-byte evidence id (metadata hash)
    h: bytes   # 32-byte evidence hash (sealed-payload hash)


@dataclass(frozen=True)
class Block:
    index: int
    prev_hash: bytes
    entries: tuple[LedgerEntry, ...]
    nonce: int
    timestamp: int
    block_hash: bytes


@dataclass(frozen=True)
class ChainConfig:
    difficulty: int = 12            # required leading zero bits of block_hash
    max_entries_per_block: int = 100

    def __post_init__(self) -> None:
        if self.difficulty < 0:
            raise InvalidInput("difficulty must be >= 0")
        if self.max_entries_per_block < 1:
            raise InvalidInput("max_entries_per_block must be >= 1")


def leading_zero_bits(digest: bytes) -> int:
    return 256 - int.from_bytes(digest, "big").bit_length()


def block_body_bytes(index: int, prev_hash: bytes, timestamp: int,
                     entries: tuple[LedgerEntry, ...]) -> bytes:
    """Canonical block bytes minus the trailing 8-byte nonce."""
    out = bytearray()
    out += int(index).to_bytes(8, "big")
    out += prev_hash
    out += int(timestamp).to_bytes(8, "big")
    out += len(entries).to_bytes(4, "big")
    for entry in entries:
        out += entry.id
        out += entry.h
    return bytes(out)


def block_bytes(block: Block) -> bytes:
    return (
        block_body_bytes(block.index, block.prev_hash, block.timestamp, block.entries)
        + block.nonce.to_bytes(8, "big")
    )


def hash_block(block: Block) -> bytes:
    return hashlib.sha256(block_bytes(block)).digest()


def block_from_bytes(raw: bytes) -> Block:
    if len(raw) < 8 + 32 + 8 + 4 + 8:
        raise InvalidInput("block record too short")
    index = int.from_bytes(raw[0:8], "big")
    prev_hash = raw[8:40]
    timestamp = int.from_bytes(raw[40:48], "big")
    n = int.from_bytes(raw[48:52], "big")
    off = 52
    entries = []
    for _ in range(n):
        entries.append(LedgerEntry(id=raw[off:off + 32], h=raw[off + 32:off + 64]))
        off += 64
    nonce = int.from_bytes(raw[off:off + 8], "big")
    block = Block(
        index=index, prev_hash=prev_hash, entries=tuple(entries),
        nonce=nonce, timestamp=timestamp, block_hash=b"",
    )
    return _replace(block, block_hash=hash_block(block))


def mine_block(index: int, prev_hash: bytes, entries: tuple[LedgerEntry, ...],
               difficulty: int, timestamp: int | None = None) -> Block:
    if timestamp is None:
        timestamp = int(_time.time())
    body = block_body_bytes(index, prev_hash, timestamp, entries)
    nonce = kernels.pow_search(body, difficulty, 0, MAX_MINE_ITERS)
    if nonce is None:
        raise RuntimeError("mining exhausted the nonce budget")
    block = Block(
        index=index, prev_hash=prev_hash, entries=entries,
        nonce=nonce, timestamp=timestamp, block_hash=b"",
    )
    return _replace(block, block_hash=hash_block(block))


# --- persistence ------------------------------------------------------------

class MemoryChainStore:
    """Keeps blocks only for the life of the process."""

    def load(self) -> list[Block]:
        return []

    def append(self, block: Block) -> None:
        pass


class FileChainStore:
    """Append-only file of length-prefixed canonical block bytes."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def load(self) -> list[Block]:
        if not self.path.exists():
            return []
        blocks = []
        raw = self.path.read_bytes()
        off = 0
        while off < len(raw):
            if off + 4 > len(raw):
                raise InvalidInput("truncated chain file")
            size = int.from_bytes(raw[off:off + 4], "big")
            off += 4
            if off + size > len(raw):
                raise InvalidInput("truncated chain file")
            blocks.append(block_from_bytes(raw[off:off + size]))
            off += size
        return blocks

    def append(self, block: Block) -> None:
        raw = block_bytes(block)
        with self.path.open("ab") as fh:
            fh.write(len(raw).to_bytes(4, "big"))
            fh.write(raw)
            fh.flush()


# --- the chain --------------------------------------------------------------

@dataclass
class _IndexSlot:
    block_index: int
    offset: int
    h: bytes


class Chain:
    """Single-writer proof-of-work chain with an O(1) id index.

    Readers (fetch, validate, blocks) never block behind the miner: the
    block list is append-only and the id index is only extended after the
    block is fully appended.
    """

    def __init__(self, config: ChainConfig | None = None,
                 store: MemoryChainStore | FileChainStore | None = None) -> None:
        self.config = config or ChainConfig()
        self._store = store or MemoryChainStore()
        self._write_lock = threading.Lock()
        self._blocks: list[Block] = list(self._store.load())
        self._index: dict[bytes, _IndexSlot] = {}
        for block in self._blocks:
            self._index_block(block)

    def _index_block(self, block: Block) -> None:
        for offset, entry in enumerate(block.entries):
            self._index[entry.id] = _IndexSlot(block.index, offset, entry.h)

    # -- writes --

    def commit(self, entries: list[LedgerEntry] | tuple[LedgerEntry, ...]) -> Block:
        """Mine the entries into a new block and append it."""
        entries = tuple(entries)
        if not entries:
            raise EmptyCommit("refusing to mine an empty block")
        if len(entries) > self.config.max_entries_per_block:
            raise InvalidInput(
                f"batch of {len(entries)} exceeds max_entries_per_block="
                f"{self.config.max_entries_per_block}"
            )
        seen: set[bytes] = set()
        for entry in entries:
            if len(entry.id) != 32 or len(entry.h) != 32:
                raise InvalidInput("entry id and hash must be 32 bytes")
            if entry.id in seen:
                raise DuplicateEntry(f"duplicate id within batch: {entry.id.hex()}")
            seen.add(entry.id)
        with self._write_lock:
            for entry in entries:
                if entry.id in self._index:
                    raise DuplicateEntry(f"id already on chain: {entry.id.hex()}")
            prev_hash = self._blocks[-1].block_hash if self._blocks else GENESIS_PREV_HASH
            block = mine_block(len(self._blocks), prev_hash, entries, self.config.difficulty)
            self._store.append(block)
            self._blocks.append(block)
            self._index_block(block)
        return block

    # -- reads --

    def fetch(self, id: bytes) -> bytes:
        """Return the evidence hash committed for an id."""
        slot = self._index.get(id)
        if slot is None:
            raise NotFound(f"no ledger entry for id {id.hex()}")
        return slot.h

    def locate(self, id: bytes) -> tuple[int, int, bytes]:
        """(block index, offset, hash) for an id; NotFound otherwise."""
        slot = self._index.get(id)
        if slot is None:
            raise NotFound(f"no ledger entry for id {id.hex()}")
        return slot.block_index, slot.offset, slot.h

    def block(self, index: int) -> Block:
        blocks = self._blocks
        if index < 0 or index >= len(blocks):
            raise NotFound(f"no block at index {index}")
        return blocks[index]

    def blocks(self) -> list[Block]:
        return list(self._blocks)

    def __len__(self) -> int:
        return len(self._blocks)

    def entry_count(self) -> int:
        return sum(len(b.entries) for b in self._blocks)

    def validate_chain(self) -> int | None:
        """Verify linkage, recomputed hashes, difficulty, and index-position
        consistency.  Returns the first invalid block index, or None."""
        blocks = list(self._blocks)
        prev = GENESIS_PREV_HASH
        for position, block in enumerate(blocks):
            if block.index != position:
                return position
            if block.prev_hash != prev:
                return position
            recomputed = hash_block(block)
            if recomputed != block.block_hash:
                return position
            if leading_zero_bits(recomputed) < self.config.difficulty:
                return position
            prev = block.block_hash
        return None

    def rebuild_index(self) -> dict[bytes, tuple[int, int]]:
        """Full-scan index, for cross-checking the incremental one."""
        scan: dict[bytes, tuple[int, int]] = {}
        for block in self._blocks:
            for offset, entry in enumerate(block.entries):
                scan[entry.id] = (block.index, offset)
        return scan
