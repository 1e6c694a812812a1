"""Local RPC over the embedded chain."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from tapestry.errors import DuplicateEntry, EmptyCommit, InvalidInput, NotFound
from tapestry.ledger import Block, Chain, LedgerEntry


class WireEntry(BaseModel):
    id: str
    h: str


class CommitRequest(BaseModel):
    entries: list[WireEntry]


def block_to_wire(block: Block) -> dict:
    return {
        "index": block.index,
        "prev_hash": block.prev_hash.hex(),
        "entries": [{"id": e.id.hex(), "h": e.h.hex()} for e in block.entries],
        "nonce": block.nonce,
        "timestamp": block.timestamp,
        "block_hash": block.block_hash.hex(),
    }


def create_ledger_app(chain: Chain) -> FastAPI:
    app = FastAPI(title="tapestry-ledger", docs_url=None, redoc_url=None)
    app.state.chain = chain

    @app.post("/ledger/commit")
    def commit(request: CommitRequest) -> dict:
        try:
            entries = [
                LedgerEntry(id=bytes.fromhex(e.id), h=bytes.fromhex(e.h))
                for e in request.entries
            ]
        except ValueError as exc:
            raise HTTPException(422, detail=f"bad hex: {exc}") from exc
        try:
            block = chain.commit(entries)
        except EmptyCommit as exc:
            raise HTTPException(400, detail=str(exc)) from exc
        except DuplicateEntry as exc:
            raise HTTPException(409, detail=str(exc)) from exc
        except InvalidInput as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        return block_to_wire(block)

    @app.get("/ledger/entry/{id_hex}")
    def entry(id_hex: str) -> dict:
        try:
            id_ = bytes.fromhex(id_hex)
        except ValueError as exc:
            raise HTTPException(422, detail="id must be hex") from exc
        try:
            block_index, offset, h = chain.locate(id_)
        except NotFound as exc:
            raise HTTPException(404, detail=str(exc)) from exc
        return {"id": id_hex, "h": h.hex(), "block_index": block_index, "offset": offset}

    @app.get("/ledger/validate")
    def validate() -> dict:
        first_invalid = chain.validate_chain()
        return {
            "ok": first_invalid is None,
            "first_invalid_index": first_invalid,
            "blocks": len(chain),
            "entries": chain.entry_count(),
        }

    @app.get("/ledger/blocks/{index}")
    def block(index: int) -> dict:
        try:
            return block_to_wire(chain.block(index))
        except NotFound as exc:
            raise HTTPException(404, detail=str(exc)) from exc

    return app
