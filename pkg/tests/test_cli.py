"""The command-line surface, end to end over real local HTTP services."""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest

from tapestry import viz


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def wait_until(url: str, timeout: float = 20.0) -> None:
    deadline = time.time() + timeout
    while time.time() < deadline:
        try:
            if httpx.get(url, timeout=1.0).status_code < 500:
                return
        except httpx.HTTPError:
            time.sleep(0.1)
    raise RuntimeError(f"service at {url} did not come up")


def run_cli(*args: str, check: bool = True) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "tapestry.cli", *args],
        capture_output=True, text=True, check=check,
    )


@pytest.fixture(scope="module")
def services(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    ledger_port, lake_port, verifier_port = free_port(), free_port(), free_port()
    ledger_url = f"http://127.0.0.1:{ledger_port}"
    lake_url = f"http://127.0.0.1:{lake_port}"
    verifier_url = f"http://127.0.0.1:{verifier_port}"
    procs = [
        subprocess.Popen(
            [sys.executable, "-m", "tapestry.cli", "serve", "ledger",
             "--port", str(ledger_port), "--difficulty", "12"],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL),
    ]
    try:
        wait_until(f"{ledger_url}/ledger/validate")
        procs.append(subprocess.Popen(
            [sys.executable, "-m", "tapestry.cli", "serve", "lake",
             "--port", str(lake_port), "--ledger", ledger_url],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL))
        wait_until(f"{lake_url}/healthz")
        procs.append(subprocess.Popen(
            [sys.executable, "-m", "tapestry.cli", "serve", "verifier",
             "--port", str(verifier_port), "--lake", lake_url,
             "--ledger", ledger_url,
             "--decisions", str(tmp / "decisions.jsonl")],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL))
        wait_until(f"{verifier_url}/api/report/none", timeout=20.0)
        yield {"ledger": ledger_url, "lake": lake_url,
               "verifier": verifier_url, "tmp": tmp}
    finally:
        for proc in procs:
            proc.terminate()
        for proc in procs:
            proc.wait(timeout=10)


@pytest.mark.usefixtures("services")
class TestCliFlow:
    def test_full_subject_verifier_flow(self, services):
        tmp = services["tmp"]
        id_path = tmp / "id.json"
        feed_path = tmp / "corpus.jsonl"
        grant_path = tmp / "grant.json"
        report_path = tmp / "report.json"

        out = run_cli("keygen", "--out", str(id_path), "--seed", "00" * 32)
        assert "identity" in out.stdout
        assert id_path.exists()

        out = run_cli("corpus", "synth", "--users", "2", "--activities", "50",
                      "--out", str(feed_path))
        assert "2 users x 50 activities" in out.stdout

        out = run_cli("ingest", "--identity", str(id_path),
                      "--feed", str(feed_path), "--lake", services["lake"],
                      "--user", "user000")
        assert "submitted 50 records" in out.stdout

        feed = [json.loads(line) for line in feed_path.read_text().splitlines()]
        times = [row["time"] for row in feed if row["user"] == "user000"]

        run_cli("grant", "--identity", str(id_path),
                "--from", str(min(times)), "--to", str(max(times)),
                "--type", "twitter.text", "--out", str(grant_path))
        inspect = run_cli("grant", "--inspect", str(grant_path))
        summary = json.loads(inspect.stdout)
        assert summary["key_count"] == len(json.loads(
            grant_path.read_text())["keys"])

        # ensure everything is anchored before verification
        httpx.post(f"{services['lake']}/admin/flush", timeout=30.0)

        render_dir = tmp / "render"
        out = run_cli("verify", "--grant", str(grant_path),
                      "--lake", services["lake"], "--ledger", services["ledger"],
                      "--out", str(report_path), "--render-dir", str(render_dir))
        assert out.stdout.startswith("Verified")
        report = json.loads(report_path.read_text())
        assert report["verdict"] == "Verified"
        assert len(report["items"]) == 50
        assert (render_dir / "pie.svg").exists()
        assert (render_dir / "slash.svg").exists()

        log_path = tmp / "mydecisions.jsonl"
        out = run_cli("decide", "--report", str(report_path),
                      "--decision", "trust", "--note", "coherent history",
                      "--log", str(log_path))
        assert "decision #0 (trust)" in out.stdout
        assert log_path.exists()

    def test_viz_subcommands(self, services):
        tmp = services["tmp"]
        sys.path.insert(0, str(Path(__file__).parent))
        from viz_fixtures import fixture_models

        model = fixture_models()["hijack_run"]
        model_path = tmp / "model.json"
        model_path.write_text(viz.model_to_json(model))
        pie_path, slash_path = tmp / "pie.svg", tmp / "slash.svg"
        run_cli("viz", "pie", "--model", str(model_path), "--out", str(pie_path))
        run_cli("viz", "slash", "--model", str(model_path), "--out", str(slash_path))
        assert pie_path.read_bytes() == viz.render_pie(model)
        day_model = viz.VisualizationModel(
            buckets=tuple(b for b in model.buckets if b.kind == "day"))
        assert slash_path.read_bytes() == viz.render_slash(day_model)

    def test_verifier_api_flow_over_http(self, services):
        tmp = services["tmp"]
        grant_path = tmp / "grant.json"
        grant_wire = json.loads(grant_path.read_text())
        report = httpx.post(f"{services['verifier']}/api/verify",
                            json=grant_wire, timeout=60.0).json()
        assert report["verdict"] == "Verified"
        again = httpx.get(
            f"{services['verifier']}/api/report/{report['report_id']}",
            timeout=10.0).json()
        assert again["report_id"] == report["report_id"]
        decided = httpx.post(f"{services['verifier']}/api/decision", json={
            "report_id": report["report_id"], "decision": "trust",
            "note": "via http",
        }, timeout=10.0)
        assert decided.status_code == 200
        decisions = (tmp / "decisions.jsonl").read_text().splitlines()
        assert len(decisions) == 1
