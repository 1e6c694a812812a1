"""Verifier API backing the human console.

POST /api/verify runs the verification workflow on an uploaded grant and
returns the full report (with server-rendered SVG embedded); reports stay
addressable by id, and decisions land in the append-only decision log.
When a console build directory is configured, it is served at the root.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from tapestry import workflows
from tapestry.errors import InvalidInput
from tapestry.services.clients import Retryable


class DecisionRequest(BaseModel):
    report_id: str
    decision: str
    note: str = ""


def create_verifier_app(
    lake,
    ledger,
    decision_log: workflows.DecisionLog,
    static_dir: str | Path | None = None,
    window_size: int = 20,
) -> FastAPI:
    app = FastAPI(title="tapestry-verifier", docs_url=None, redoc_url=None)
    reports: dict[str, dict] = {}
    app.state.reports = reports

    @app.post("/api/verify")
    def verify(grant_wire: dict) -> dict:
        try:
            grant = workflows.grant_from_wire(grant_wire)
        except InvalidInput as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        try:
            report = workflows.verify_subject(
                grant, lake, ledger, window_size=window_size
            )
        except Retryable as exc:
            raise HTTPException(503, detail=str(exc)) from exc
        wire = workflows.report_to_wire(report)
        reports[report.report_id] = wire
        return wire

    @app.get("/api/report/{report_id}")
    def get_report(report_id: str) -> dict:
        report = reports.get(report_id)
        if report is None:
            raise HTTPException(404, detail=f"no report {report_id}")
        return report

    @app.post("/api/decision")
    def decide(request: DecisionRequest) -> dict:
        if request.report_id not in reports:
            raise HTTPException(404, detail=f"no report {request.report_id}")
        try:
            record = decision_log.record(request.report_id, request.decision,
                                         request.note)
        except InvalidInput as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        reports[request.report_id]["decision"] = {
            "decision": record.decision,
            "note": record.note,
            "recorded_at": record.recorded_at,
            "seq": record.seq,
        }
        return reports[request.report_id]["decision"]

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="console")

    return app
