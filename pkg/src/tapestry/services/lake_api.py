"""HTTP surface of the data lake."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from tapestry import kernels, records
from tapestry.datalake import DataLake, DisclosureQuery
from tapestry.errors import (
    AlreadyStored,
    InvalidInput,
    RejectedUnauthenticated,
    Unauthorized,
)


class DeleteRequest(BaseModel):
    pk: str
    signature: str | None = None


def create_lake_app(lake: DataLake) -> FastAPI:
    app = FastAPI(title="tapestry-lake", docs_url=None, redoc_url=None)
    app.state.lake = lake

    @app.post("/te")
    def submit(te_wire: dict) -> dict:
        try:
            te = records.te_from_wire(te_wire)
        except InvalidInput as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        try:
            id_ = lake.submit(te)
        except RejectedUnauthenticated as exc:
            raise HTTPException(401, detail=str(exc)) from exc
        except AlreadyStored as exc:
            raise HTTPException(409, detail=str(exc)) from exc
        return {"id": id_.hex()}

    @app.get("/te")
    def query(
        pk: str,
        start: int = Query(alias="from"),
        end: int = Query(alias="to"),
        type: list[str] = Query(default=[]),  # noqa: A002 - wire name
    ) -> dict:
        try:
            q = DisclosureQuery(
                pk=bytes.fromhex(pk), start=start, end=end,
                activity_types=tuple(type),
            )
        except (InvalidInput, ValueError) as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        return {"items": [records.te_to_wire(te) for te in lake.query(q)]}

    @app.post("/te/delete")
    def delete(request: DeleteRequest) -> dict:
        try:
            pk = bytes.fromhex(request.pk)
        except ValueError as exc:
            raise HTTPException(422, detail="pk must be hex") from exc
        if request.signature is None:
            return {"challenge": lake.issue_delete_challenge(pk).hex()}
        try:
            deleted = lake.delete(pk, bytes.fromhex(request.signature))
        except Unauthorized as exc:
            raise HTTPException(403, detail=str(exc)) from exc
        return {"deleted": deleted}

    @app.post("/admin/flush")
    def flush() -> dict:
        return {"anchored": lake.flush()}

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "kernel_lane": kernels.LANE, **lake.stats()}

    return app
