"""Off-chain storage for encrypted trust evidence.

The lake verifies each submitted record's signature, stores it (memory or
a JSON-lines log), and anchors (evidence id -> evidence hash) pairs to the
ledger in batches.  Anchoring runs asynchronously: a worker drains the
pending queue on a flush interval, and flush() forces it for tests and the
admin endpoint.  Deletion is owner-authenticated through a challenge nonce
signed by the subject; ledger entries stay behind (hashes carry no
personal data), so a deleted-and-resubmitted record re-anchors against the
existing entry.
"""

from __future__ import annotations

import bisect
import json
import logging
import os
import threading
import time as _time
from dataclasses import dataclass
from pathlib import Path

from tapestry import records
from tapestry.errors import (
    AlreadyStored,
    DuplicateEntry,
    InvalidInput,
    NotFound,
    RejectedUnauthenticated,
    Unauthorized,
)
from tapestry.ledger import Chain, LedgerEntry
from tapestry.records import TrustEvidence

logger = logging.getLogger(__name__)

DELETE_CONTEXT = b"DELETE"


@dataclass
class StoredRecord:
    te: TrustEvidence
    id: bytes
    received_at: int
    anchored: bool = False
    anchor_block: int | None = None


@dataclass(frozen=True)
class DisclosureQuery:
    pk: bytes
    start: int
    end: int
    activity_types: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise InvalidInput("query start must be <= end")
        if not self.activity_types:
            raise InvalidInput("query needs at least one activity type")


@dataclass(frozen=True)
class LakeConfig:
    data_path: str | None = None        # JSONL log; None keeps records in memory
    flush_interval: float = 0.5         # seconds between anchor flushes
    max_entries_per_block: int = 100
    ledger_endpoint: str | None = None  # base URL of the ledger RPC

    @classmethod
    def from_sources(cls, path: str | Path | None = None,
                     env: dict[str, str] | None = None) -> "LakeConfig":
        """Config file plus TAPESTRY_LAKE_* environment overrides."""
        raw: dict = {}
        if path is not None:
            raw.update(json.loads(Path(path).read_text()))
        env = os.environ if env is None else env
        if "TAPESTRY_LAKE_DATA_PATH" in env:
            raw["data_path"] = env["TAPESTRY_LAKE_DATA_PATH"]
        if "TAPESTRY_LAKE_FLUSH_INTERVAL" in env:
            raw["flush_interval"] = float(env["TAPESTRY_LAKE_FLUSH_INTERVAL"])
        if "TAPESTRY_LAKE_BLOCK_SIZE" in env:
            raw["max_entries_per_block"] = int(env["TAPESTRY_LAKE_BLOCK_SIZE"])
        if "TAPESTRY_LAKE_LEDGER_ENDPOINT" in env:
            raw["ledger_endpoint"] = env["TAPESTRY_LAKE_LEDGER_ENDPOINT"]
        known = {k: raw[k] for k in ("data_path", "flush_interval",
                                     "max_entries_per_block", "ledger_endpoint")
                 if k in raw}
        return cls(**known)


class DataLake:
    """One lake instance backed by one ledger (several lakes may share it)."""

    def __init__(self, ledger: Chain, config: LakeConfig | None = None) -> None:
        self.config = config or LakeConfig()
        self._ledger = ledger
        self._lock = threading.RLock()
        self._by_id: dict[bytes, StoredRecord] = {}
        # per-pk time-sorted (time, id) pairs for range queries
        self._by_pk: dict[bytes, list[tuple[int, bytes]]] = {}
        self._pending: list[bytes] = []      # ids awaiting anchoring
        self._challenges: dict[bytes, bytes] = {}
        self._log_path = Path(self.config.data_path) if self.config.data_path else None
        self._worker: threading.Thread | None = None
        self._stop = threading.Event()
        if self._log_path is not None and self._log_path.exists():
            self._replay_log()

    # -- persistence --

    def _append_log(self, op: dict) -> None:
        if self._log_path is None:
            return
        with self._log_path.open("a") as fh:
            fh.write(json.dumps(op, sort_keys=True))
            fh.write("\n")
            fh.flush()

    def _replay_log(self) -> None:
        with self._log_path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                op = json.loads(line)
                if op["op"] == "put":
                    te = records.te_from_wire(op["te"])
                    self._insert(te, received_at=int(op["received_at"]), log=False)
                elif op["op"] == "delete":
                    self._remove_pk(bytes.fromhex(op["pk"]), log=False)
                elif op["op"] == "anchor":
                    id_ = bytes.fromhex(op["id"])
                    rec = self._by_id.get(id_)
                    if rec is not None:
                        rec.anchored = True
                        rec.anchor_block = op["block"]
                        if id_ in self._pending:
                            self._pending.remove(id_)

    # -- the anchoring worker --

    def start_worker(self) -> None:
        if self._worker is not None:
            return
        self._stop.clear()
        self._worker = threading.Thread(target=self._worker_loop,
                                        name="lake-anchor", daemon=True)
        self._worker.start()

    def stop_worker(self) -> None:
        if self._worker is None:
            return
        self._stop.set()
        self._worker.join()
        self._worker = None

    def _worker_loop(self) -> None:
        while not self._stop.wait(self.config.flush_interval):
            try:
                self.flush()
            except Exception:
                logger.exception("anchor flush failed")

    def flush(self) -> int:
        """Anchor everything pending; returns how many records were anchored."""
        anchored = 0
        while True:
            with self._lock:
                batch = self._pending[: self.config.max_entries_per_block]
                self._pending = self._pending[len(batch):]
            if not batch:
                return anchored
            try:
                anchored += self._anchor_batch(batch)
            except Exception:
                # ledger unreachable or mid-commit failure: keep the batch
                # queued so the next flush retries it
                with self._lock:
                    self._pending = batch + self._pending
                raise

    def _anchor_batch(self, ids: list[bytes]) -> int:
        fresh: list[LedgerEntry] = []
        done: list[tuple[bytes, int]] = []
        for id_ in ids:
            rec = self._by_id.get(id_)
            if rec is None:  # deleted while pending
                continue
            h = records.evidence_hash(rec.te)
            try:
                existing = self._ledger.fetch(id_)
            except NotFound:
                fresh.append(LedgerEntry(id=id_, h=h))
                continue
            if existing == h:
                # already on chain (e.g. resubmission after deletion)
                block_index = self._ledger.locate(id_)[0]
                done.append((id_, block_index))
            else:
                logger.warning("ledger already holds a different hash for %s",
                               id_.hex())
        if fresh:
            try:
                block = self._ledger.commit(fresh)
                done.extend((entry.id, block.index) for entry in fresh)
            except DuplicateEntry:
                # raced with another lake on the same ledger; retry one by one
                for entry in fresh:
                    try:
                        block = self._ledger.commit([entry])
                        done.append((entry.id, block.index))
                    except DuplicateEntry:
                        if self._ledger.fetch(entry.id) == entry.h:
                            done.append((entry.id, self._ledger.locate(entry.id)[0]))
        count = 0
        with self._lock:
            for id_, block_index in done:
                rec = self._by_id.get(id_)
                if rec is None:
                    continue
                rec.anchored = True
                rec.anchor_block = block_index
                self._append_log({"op": "anchor", "id": id_.hex(), "block": block_index})
                count += 1
        return count

    # -- core operations --

    def _insert(self, te: TrustEvidence, received_at: int, log: bool = True) -> bytes:
        id_ = records.evidence_id(te)
        with self._lock:
            if id_ in self._by_id:
                raise AlreadyStored(f"record {id_.hex()} already stored")
            rec = StoredRecord(te=te, id=id_, received_at=received_at)
            self._by_id[id_] = rec
            bisect.insort(self._by_pk.setdefault(te.pk, []), (te.time, id_))
            self._pending.append(id_)
            if log:
                self._append_log({
                    "op": "put", "te": records.te_to_wire(te),
                    "received_at": received_at,
                })
        return id_

    def submit(self, te: TrustEvidence) -> bytes:
        """Store one record after checking its signature; queues anchoring."""
        if not records.verify_evidence_signature(te):
            raise RejectedUnauthenticated("evidence signature does not verify")
        return self._insert(te, received_at=int(_time.time()))

    def query(self, q: DisclosureQuery) -> list[TrustEvidence]:
        """All records with matching pk, time in [start, end], type in the
        requested set, in ascending time order."""
        wanted = set(q.activity_types)
        with self._lock:
            rows = list(self._by_pk.get(q.pk, ()))
        out = []
        lo = bisect.bisect_left(rows, (q.start, b""))
        for t, id_ in rows[lo:]:
            if t > q.end:
                break
            rec = self._by_id.get(id_)
            if rec is not None and rec.te.activity_type in wanted:
                out.append(rec.te)
        return out

    def record(self, id_: bytes) -> StoredRecord:
        rec = self._by_id.get(id_)
        if rec is None:
            raise NotFound(f"no stored record {id_.hex()}")
        return rec

    def stats(self) -> dict:
        with self._lock:
            return {
                "records": len(self._by_id),
                "pending": len(self._pending),
                "anchored": sum(1 for r in self._by_id.values() if r.anchored),
            }

    # -- deletion (challenge/response) --

    def issue_delete_challenge(self, pk: bytes) -> bytes:
        nonce = os.urandom(32)
        with self._lock:
            self._challenges[pk] = nonce
        return nonce

    def delete(self, pk: bytes, signature: bytes) -> int:
        """Remove every record for pk if the signature proves ownership.

        The proof signs DELETE || challenge-nonce.  Ledger entries are left
        untouched.
        """
        from tapestry import crypto

        with self._lock:
            nonce = self._challenges.pop(pk, None)
        if nonce is None:
            raise Unauthorized("no outstanding deletion challenge for this identity")
        if not crypto.verify_signature(pk, DELETE_CONTEXT + nonce, signature):
            raise Unauthorized("deletion proof does not verify")
        return self._remove_pk(pk)

    def _remove_pk(self, pk: bytes, log: bool = True) -> int:
        with self._lock:
            rows = self._by_pk.pop(pk, [])
            removed = 0
            for _, id_ in rows:
                if self._by_id.pop(id_, None) is not None:
                    removed += 1
            if removed and log:
                self._append_log({"op": "delete", "pk": pk.hex()})
        return removed

    # -- tamper hook for tests: the "malicious lake" mutates a ciphertext --

    def tamper_ciphertext(self, id_: bytes, bit: int) -> None:
        from dataclasses import replace

        from tapestry.crypto import SealedBox

        rec = self.record(id_)
        raw = bytearray(rec.te.cdata.ciphertext)
        raw[(bit // 8) % len(raw)] ^= 1 << (bit % 8)
        rec.te = replace(rec.te, cdata=SealedBox(rec.te.cdata.nonce, bytes(raw)))
