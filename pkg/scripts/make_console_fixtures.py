"""Generate the console test fixtures from a real service stack.

Writes, for each of the happy-path / tampered-lake / wrong-key scenarios,
the grant, the API-served report JSON (compact, exactly as fetch() sees
it), and the CLI-written report JSON (indent=2, sorted) into
frontend/tests/fixtures/.  Also writes the grant summary the CLI's
`grant --inspect` prints, for the cross-tool consistency check.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

from fastapi.testclient import TestClient

from tapestry import crypto, workflows
from tapestry.analysis.behavior import Activity
from tapestry.analysis.embedding import HashEmbedder
from tapestry.datalake import DataLake, LakeConfig
from tapestry.ledger import Chain, ChainConfig
from tapestry.services.clients import HttpLakeClient, HttpLedgerClient
from tapestry.services.lake_api import create_lake_app
from tapestry.services.ledger_api import create_ledger_app
from tapestry.services.verifier_api import create_verifier_app

T0 = 1_600_041_600
OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def build_stack(tmp_decisions: Path):
    chain = Chain(ChainConfig(difficulty=6))
    ledger_http = TestClient(create_ledger_app(chain))
    lake = DataLake(HttpLedgerClient(client=ledger_http), LakeConfig())
    lake_http = TestClient(create_lake_app(lake))
    verifier_http = TestClient(create_verifier_app(
        HttpLakeClient(client=lake_http),
        HttpLedgerClient(client=ledger_http),
        workflows.DecisionLog(tmp_decisions),
    ))
    return chain, lake, lake_http, verifier_http


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    identity = crypto.generate_identity(bytes([42]) * 32)
    embedder = HashEmbedder()
    feed = [Activity(f"steady{i % 5}x routine{i % 3}x topic{i % 7}x",
                     T0 + i * 3600) for i in range(48)]

    def ingest_and_grant(lake, lake_http):
        client = HttpLakeClient(client=lake_http)
        report = workflows.subject_ingest(identity, feed, client, embedder)
        assert not report.errors
        lake.flush()
        return workflows.grant_disclosure(
            identity, feed[0].time, feed[-1].time, ("twitter.text",))

    scenarios = {}

    # happy path
    chain, lake, lake_http, verifier_http = build_stack(OUT / "d1.jsonl")
    grant = ingest_and_grant(lake, lake_http)
    scenarios["happy"] = (grant, verifier_http)

    # tampered ciphertext in the lake
    chain, lake, lake_http, verifier_http = build_stack(OUT / "d2.jsonl")
    grant_t = ingest_and_grant(lake, lake_http)
    victim = sorted(lake._by_id)[7]
    lake.tamper_ciphertext(victim, bit=11)
    scenarios["tamper"] = (grant_t, verifier_http)

    # wrong key in the grant
    chain, lake, lake_http, verifier_http = build_stack(OUT / "d3.jsonl")
    grant_w = ingest_and_grant(lake, lake_http)
    bad = replace(grant_w.keys[0], ek=bytes(32))
    grant_w = replace(grant_w, keys=(bad,) + grant_w.keys[1:])
    scenarios["wrongkey"] = (grant_w, verifier_http)

    for name, (g, verifier_http) in scenarios.items():
        wire = workflows.grant_to_wire(g)
        (OUT / f"grant_{name}.json").write_text(json.dumps(wire, indent=2))
        response = verifier_http.post("/api/verify", json=wire)
        response.raise_for_status()
        # the API form, byte-exact as fetch() receives it
        (OUT / f"api_report_{name}.json").write_bytes(response.content)
        # the CLI form, as `tapestry verify --out` writes it
        (OUT / f"cli_report_{name}.json").write_text(
            json.dumps(response.json(), indent=2, sort_keys=True))
        print(f"{name}: verdict={response.json()['verdict']}")

    # grant summary as `tapestry grant --inspect` prints it
    summary = {
        "pk": scenarios["happy"][0].pk.hex(),
        "from": scenarios["happy"][0].start,
        "to": scenarios["happy"][0].end,
        "activity_types": list(scenarios["happy"][0].activity_types),
        "key_count": len(scenarios["happy"][0].keys),
    }
    (OUT / "grant_summary_happy.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True))
    for leftover in OUT.glob("d*.jsonl"):
        leftover.unlink(missing_ok=True)
    print(f"fixtures in {OUT}")


if __name__ == "__main__":
    main()
