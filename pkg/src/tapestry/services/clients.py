"""Thin clients for the lake and ledger endpoints.

Each comes in two flavours with the same surface: an HTTP client that
wraps any httpx-compatible client (a real connection or a test-client
bound straight to an ASGI app), and a local adapter that calls the
in-process objects directly.  Workflow code only sees the shared surface:
``query_wire``/``submit_wire``/... on lakes, ``fetch_wire``/... on ledgers.
"""

from __future__ import annotations

import httpx

from tapestry import records
from tapestry.datalake import DataLake, DisclosureQuery
from tapestry.errors import (
    AlreadyStored,
    DuplicateEntry,
    EmptyCommit,
    NotFound,
    RejectedUnauthenticated,
    TapestryError,
    Unauthorized,
)
from tapestry.ledger import Chain, LedgerEntry


class Retryable(TapestryError):
    """A network-level failure; the call may be retried."""


class _RemoteBlock:
    def __init__(self, index: int) -> None:
        self.index = index


def _raise_for(status: int, detail: str) -> None:
    if status == 401:
        raise RejectedUnauthenticated(detail)
    if status == 403:
        raise Unauthorized(detail)
    if status == 409:
        raise AlreadyStored(detail)
    if status >= 500:
        raise Retryable(detail)
    raise TapestryError(detail)


def _detail(response: httpx.Response) -> str:
    try:
        return response.json().get("detail", response.text)
    except Exception:
        return response.text


class HttpLakeClient:
    def __init__(self, client: httpx.Client | None = None,
                 base_url: str | None = None) -> None:
        if client is None:
            if base_url is None:
                raise ValueError("need a client or a base_url")
            client = httpx.Client(base_url=base_url, timeout=30.0)
        self._client = client

    def submit_wire(self, te_wire: dict) -> str:
        try:
            response = self._client.post("/te", json=te_wire)
        except httpx.HTTPError as exc:
            raise Retryable(str(exc)) from exc
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return response.json()["id"]

    def submit(self, te) -> bytes:
        return bytes.fromhex(self.submit_wire(records.te_to_wire(te)))

    def query_wire(self, pk: bytes, start: int, end: int,
                   types: tuple[str, ...]) -> list[dict]:
        try:
            response = self._client.get("/te", params={
                "pk": pk.hex(), "from": start, "to": end, "type": list(types),
            })
        except httpx.HTTPError as exc:
            raise Retryable(str(exc)) from exc
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return response.json()["items"]

    def request_delete_challenge(self, pk: bytes) -> bytes:
        response = self._client.post("/te/delete", json={"pk": pk.hex()})
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return bytes.fromhex(response.json()["challenge"])

    def delete(self, pk: bytes, signature: bytes) -> int:
        response = self._client.post("/te/delete", json={
            "pk": pk.hex(), "signature": signature.hex(),
        })
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return response.json()["deleted"]

    def flush(self) -> int:
        response = self._client.post("/admin/flush")
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return response.json()["anchored"]

    def health(self) -> dict:
        response = self._client.get("/healthz")
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return response.json()


class LocalLakeClient:
    """Direct adapter over an in-process DataLake."""

    def __init__(self, lake: DataLake) -> None:
        self._lake = lake

    def submit_wire(self, te_wire: dict) -> str:
        return self._lake.submit(records.te_from_wire(te_wire)).hex()

    def submit(self, te) -> bytes:
        return self._lake.submit(te)

    def query_wire(self, pk: bytes, start: int, end: int,
                   types: tuple[str, ...]) -> list[dict]:
        tes = self._lake.query(DisclosureQuery(pk, start, end, tuple(types)))
        return [records.te_to_wire(te) for te in tes]

    def request_delete_challenge(self, pk: bytes) -> bytes:
        return self._lake.issue_delete_challenge(pk)

    def delete(self, pk: bytes, signature: bytes) -> int:
        return self._lake.delete(pk, signature)

    def flush(self) -> int:
        return self._lake.flush()

    def health(self) -> dict:
        return {"status": "ok", **self._lake.stats()}


class HttpLedgerClient:
    def __init__(self, client: httpx.Client | None = None,
                 base_url: str | None = None) -> None:
        if client is None:
            if base_url is None:
                raise ValueError("need a client or a base_url")
            client = httpx.Client(base_url=base_url, timeout=30.0)
        self._client = client

    def fetch_wire(self, id_: bytes) -> bytes | None:
        try:
            response = self._client.get(f"/ledger/entry/{id_.hex()}")
        except httpx.HTTPError as exc:
            raise Retryable(str(exc)) from exc
        if response.status_code == 404:
            return None
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return bytes.fromhex(response.json()["h"])

    def commit_wire(self, entries: list[tuple[bytes, bytes]]) -> dict:
        response = self._client.post("/ledger/commit", json={
            "entries": [{"id": i.hex(), "h": h.hex()} for i, h in entries],
        })
        if response.status_code == 409:
            raise DuplicateEntry(_detail(response))
        if response.status_code == 400:
            raise EmptyCommit(_detail(response))
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return response.json()

    def validate(self) -> int | None:
        response = self._client.get("/ledger/validate")
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        payload = response.json()
        return None if payload["ok"] else payload["first_invalid_index"]

    # Chain-shaped surface, so a DataLake can anchor against a remote ledger

    def fetch(self, id_: bytes) -> bytes:
        h = self.fetch_wire(id_)
        if h is None:
            raise NotFound(f"no ledger entry for id {id_.hex()}")
        return h

    def locate(self, id_: bytes) -> tuple[int, int, bytes]:
        response = self._client.get(f"/ledger/entry/{id_.hex()}")
        if response.status_code == 404:
            raise NotFound(f"no ledger entry for id {id_.hex()}")
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        payload = response.json()
        return payload["block_index"], payload["offset"], bytes.fromhex(payload["h"])

    def commit(self, entries: list[LedgerEntry]) -> "_RemoteBlock":
        payload = self.commit_wire([(e.id, e.h) for e in entries])
        return _RemoteBlock(index=payload["index"])

    def block(self, index: int) -> dict:
        response = self._client.get(f"/ledger/blocks/{index}")
        if response.status_code == 404:
            raise NotFound(f"no block {index}")
        if response.status_code != 200:
            _raise_for(response.status_code, _detail(response))
        return response.json()


class LocalLedgerClient:
    """Direct adapter over an in-process Chain; also usable by a DataLake."""

    def __init__(self, chain: Chain) -> None:
        self._chain = chain

    def fetch_wire(self, id_: bytes) -> bytes | None:
        try:
            return self._chain.fetch(id_)
        except NotFound:
            return None

    # DataLake-facing surface
    def fetch(self, id_: bytes) -> bytes:
        return self._chain.fetch(id_)

    def locate(self, id_: bytes) -> tuple[int, int, bytes]:
        return self._chain.locate(id_)

    def commit(self, entries: list[LedgerEntry]):
        return self._chain.commit(entries)

    def validate(self) -> int | None:
        return self._chain.validate_chain()
