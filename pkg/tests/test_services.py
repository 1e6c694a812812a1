"""HTTP surfaces: ledger RPC, lake API, verifier API, and their clients."""

from __future__ import annotations

import numpy as np
import pytest
from fastapi.testclient import TestClient

from tapestry import crypto, records, workflows
from tapestry.analysis.behavior import Activity
from tapestry.analysis.embedding import HashEmbedder
from tapestry.datalake import DataLake, LakeConfig
from tapestry.ledger import Chain, ChainConfig
from tapestry.services.clients import (
    HttpLakeClient,
    HttpLedgerClient,
    LocalLedgerClient,
)
from tapestry.services.lake_api import create_lake_app
from tapestry.services.ledger_api import create_ledger_app
from tapestry.services.verifier_api import create_verifier_app

T0 = 1_600_000_000


def make_te(identity, i, activity_type="twitter.text"):
    rng = np.random.default_rng(i)
    return records.make_evidence(identity, T0 + i * 3600, activity_type,
                                 rng.normal(size=64))


@pytest.fixture
def http_stack(tmp_path):
    """Full service stack over in-process HTTP test clients."""
    chain = Chain(ChainConfig(difficulty=4))
    ledger_app = create_ledger_app(chain)
    ledger_http = TestClient(ledger_app)
    # the lake anchors through the HTTP ledger client, like a real deployment
    lake = DataLake(HttpLedgerClient(client=ledger_http), LakeConfig())
    lake_http = TestClient(create_lake_app(lake))
    decision_log = workflows.DecisionLog(tmp_path / "decisions.jsonl")
    verifier_app = create_verifier_app(
        HttpLakeClient(client=lake_http),
        HttpLedgerClient(client=ledger_http),
        decision_log,
    )
    verifier_http = TestClient(verifier_app)
    return chain, lake, ledger_http, lake_http, verifier_http, decision_log


class TestLedgerApi:
    def test_commit_entry_validate_blocks(self, http_stack):
        _, _, ledger_http, _, _, _ = http_stack
        entries = [{"id": "11" * 32, "h": "22" * 32}]
        block = ledger_http.post("/ledger/commit", json={"entries": entries}).json()
        assert block["index"] == 0
        got = ledger_http.get(f"/ledger/entry/{'11' * 32}")
        assert got.status_code == 200
        assert got.json()["h"] == "22" * 32
        assert ledger_http.get("/ledger/validate").json()["ok"] is True
        assert ledger_http.get("/ledger/blocks/0").json()["block_hash"] == block["block_hash"]

    def test_error_codes(self, http_stack):
        _, _, ledger_http, _, _, _ = http_stack
        assert ledger_http.post("/ledger/commit",
                                json={"entries": []}).status_code == 400
        entries = [{"id": "aa" * 32, "h": "bb" * 32}]
        ledger_http.post("/ledger/commit", json={"entries": entries})
        assert ledger_http.post("/ledger/commit",
                                json={"entries": entries}).status_code == 409
        assert ledger_http.get(f"/ledger/entry/{'cc' * 32}").status_code == 404
        assert ledger_http.get("/ledger/blocks/99").status_code == 404


class TestLakeApi:
    def test_submit_query_flush_health(self, http_stack, identity):
        _, _, _, lake_http, _, _ = http_stack
        te = make_te(identity, 0)
        response = lake_http.post("/te", json=records.te_to_wire(te))
        assert response.status_code == 200
        assert response.json()["id"] == records.evidence_id(te).hex()

        got = lake_http.get("/te", params={
            "pk": identity.pk.hex(), "from": T0 - 10, "to": T0 + 10,
            "type": ["twitter.text"],
        })
        items = got.json()["items"]
        assert len(items) == 1
        assert records.te_from_wire(items[0]) == te

        flushed = lake_http.post("/admin/flush").json()
        assert flushed["anchored"] == 1
        health = lake_http.get("/healthz").json()
        assert health["status"] == "ok"
        assert health["records"] == 1

    def test_submit_error_codes(self, http_stack, identity):
        _, _, _, lake_http, _, _ = http_stack
        te = make_te(identity, 1)
        wire = records.te_to_wire(te)
        broken = dict(wire, sigma="00" * 64)
        assert lake_http.post("/te", json=broken).status_code == 401
        assert lake_http.post("/te", json=wire).status_code == 200
        assert lake_http.post("/te", json=wire).status_code == 409

    def test_delete_challenge_flow(self, http_stack, identity):
        _, _, _, lake_http, _, _ = http_stack
        lake_http.post("/te", json=records.te_to_wire(make_te(identity, 2)))
        challenge = lake_http.post(
            "/te/delete", json={"pk": identity.pk.hex()}).json()["challenge"]
        signature = crypto.sign(identity.sk, b"DELETE" + bytes.fromhex(challenge))
        done = lake_http.post("/te/delete", json={
            "pk": identity.pk.hex(), "signature": signature.hex(),
        })
        assert done.status_code == 200
        assert done.json()["deleted"] == 1

    def test_delete_bad_proof(self, http_stack, identity):
        _, _, _, lake_http, _, _ = http_stack
        lake_http.post("/te", json=records.te_to_wire(make_te(identity, 3)))
        lake_http.post("/te/delete", json={"pk": identity.pk.hex()})
        bad = lake_http.post("/te/delete", json={
            "pk": identity.pk.hex(), "signature": "00" * 64,
        })
        assert bad.status_code == 403


def ingest_and_grant(identity, lake_http, n=25):
    embedder = HashEmbedder()
    feed = [Activity(f"steady{i % 5}x routine{i % 3}x", T0 + i * 3600)
            for i in range(n)]
    lake_client = HttpLakeClient(client=lake_http)
    report = workflows.subject_ingest(identity, feed, lake_client, embedder)
    assert not report.errors
    lake_http.post("/admin/flush")
    grant = workflows.grant_disclosure(
        identity, feed[0].time, feed[-1].time, ("twitter.text",))
    return grant


class TestVerifierApi:
    def test_verify_report_decision_flow(self, http_stack, identity):
        _, _, _, lake_http, verifier_http, decision_log = http_stack
        grant = ingest_and_grant(identity, lake_http)
        wire = workflows.grant_to_wire(grant)

        report = verifier_http.post("/api/verify", json=wire).json()
        assert report["verdict"] == "Verified"
        report_id = report["report_id"]

        again = verifier_http.get(f"/api/report/{report_id}")
        assert again.status_code == 200
        assert again.json()["verdict"] == "Verified"

        decided = verifier_http.post("/api/decision", json={
            "report_id": report_id, "decision": "trust", "note": "looks fine",
        })
        assert decided.status_code == 200
        entries = decision_log.load()
        assert len(entries) == 1
        assert entries[0].decision == "trust"
        assert entries[0].note == "looks fine"  # persisted verbatim
        # the stored report now carries the decision
        assert verifier_http.get(f"/api/report/{report_id}").json()["decision"]["decision"] == "trust"

    def test_unknown_report_404(self, http_stack):
        _, _, _, _, verifier_http, _ = http_stack
        assert verifier_http.get("/api/report/deadbeef").status_code == 404
        assert verifier_http.post("/api/decision", json={
            "report_id": "deadbeef", "decision": "trust", "note": "",
        }).status_code == 404

    def test_bad_grant_422(self, http_stack):
        _, _, _, _, verifier_http, _ = http_stack
        assert verifier_http.post("/api/verify", json={"pk": "zz"}).status_code == 422

    def test_tampered_lake_rejected_over_http(self, http_stack, identity):
        _, lake, _, lake_http, verifier_http, _ = http_stack
        grant = ingest_and_grant(identity, lake_http)
        victim = records.evidence_id(
            records.te_from_wire(lake_http.get("/te", params={
                "pk": identity.pk.hex(), "from": grant.start, "to": grant.end,
                "type": ["twitter.text"],
            }).json()["items"][3]))
        lake.tamper_ciphertext(victim, bit=5)
        report = verifier_http.post(
            "/api/verify", json=workflows.grant_to_wire(grant)).json()
        assert report["verdict"] == "Rejected"
        statuses = {item["id"]: item["anchor"] for item in report["items"]}
        assert statuses[victim.hex()] == "AnchorMismatch"
        assert all(v == "AnchorOk" for k, v in statuses.items() if k != victim.hex())


class TestMultiLakeSharedLedger:
    def test_two_lakes_one_chain(self, identity):
        chain = Chain(ChainConfig(difficulty=0))
        shared = LocalLedgerClient(chain)
        lake_a = DataLake(shared, LakeConfig())
        lake_b = DataLake(shared, LakeConfig())
        te_a, te_b = make_te(identity, 10), make_te(identity, 11)
        lake_a.submit(te_a)
        lake_b.submit(te_b)
        lake_a.flush()
        lake_b.flush()
        assert chain.fetch(records.evidence_id(te_a)) == records.evidence_hash(te_a)
        assert chain.fetch(records.evidence_id(te_b)) == records.evidence_hash(te_b)
        assert chain.validate_chain() is None
