"""Command line interface.

    tapestry keygen   -> create an identity file
    tapestry ingest   -> distill a feed into evidence and submit it to a lake
    tapestry grant    -> derive disclosure keys for a window and type set
    tapestry verify   -> run the verification sequence, write the report
    tapestry decide   -> append a human trust decision to the log
    tapestry viz      -> render a model JSON to pie or slash SVG
    tapestry corpus   -> synthesize a topic-separated corpus
    tapestry serve    -> run the lake / ledger / verifier services
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from tapestry import crypto, viz, workflows
from tapestry.analysis.corpus import CorpusConfig, generate_corpus, read_feeds, write_feeds
from tapestry.analysis.embedding import HashEmbedder


@click.group()
def main() -> None:
    """Identity provenance from encrypted, ledger-anchored trust evidence."""


@main.command()
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Where to write the identity JSON.")
@click.option("--seed", default=None,
              help="32-byte hex seed for a deterministic identity (tests only).")
def keygen(out: str, seed: str | None) -> None:
    """Create a fresh subject identity."""
    rng_seed = bytes.fromhex(seed) if seed else None
    identity = crypto.generate_identity(rng_seed)
    crypto.save_identity(identity, out)
    click.echo(f"identity {identity.pk.hex()} written to {out}")


@main.command()
@click.option("--identity", "identity_path", type=click.Path(exists=True), required=True)
@click.option("--feed", "feed_path", type=click.Path(exists=True), required=True,
              help="JSON-lines feed of {user, time, text}.")
@click.option("--lake", "lake_url", required=True, help="Lake base URL.")
@click.option("--user", default=None,
              help="Which user's activities to ingest (default: first in the feed).")
@click.option("--simulate", type=click.Choice(["twitter-jsonl"]),
              default="twitter-jsonl", show_default=True,
              help="Feed capture simulation mode.")
def ingest(identity_path: str, feed_path: str, lake_url: str,
           user: str | None, simulate: str) -> None:
    """Distill a feed into trust evidence and submit it."""
    from tapestry.services.clients import HttpLakeClient

    identity = crypto.load_identity(identity_path)
    feeds = read_feeds(feed_path)
    if user is None:
        user = sorted(feeds)[0]
    if user not in feeds:
        raise click.ClickException(f"user {user!r} not present in the feed")
    lake = HttpLakeClient(base_url=lake_url)
    report = workflows.subject_ingest(identity, feeds[user], lake, HashEmbedder())
    click.echo(f"submitted {len(report.ids)} records for {user}")
    for position, reason in report.errors:
        click.echo(f"  item {position} rejected: {reason}", err=True)
    if report.errors:
        sys.exit(1)


@main.command()
@click.option("--identity", "identity_path", type=click.Path(exists=True))
@click.option("--from", "start", type=int, help="Window start, Unix seconds UTC.")
@click.option("--to", "end", type=int, help="Window end, Unix seconds UTC.")
@click.option("--type", "types", multiple=True, help="Activity type (repeatable).")
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--inspect", "inspect_path", type=click.Path(exists=True),
              help="Print a summary of an existing grant file instead.")
def grant(identity_path: str | None, start: int | None, end: int | None,
          types: tuple[str, ...], out: str | None, inspect_path: str | None) -> None:
    """Derive the disclosure keys for a window and type set."""
    if inspect_path:
        g = workflows.load_grant(inspect_path)
        click.echo(json.dumps({
            "pk": g.pk.hex(),
            "from": g.start,
            "to": g.end,
            "activity_types": list(g.activity_types),
            "key_count": len(g.keys),
        }, indent=2, sort_keys=True))
        return
    if not (identity_path and start is not None and end is not None and types and out):
        raise click.ClickException(
            "--identity, --from, --to, --type and --out are required")
    identity = crypto.load_identity(identity_path)
    g = workflows.grant_disclosure(identity, start, end, types)
    workflows.save_grant(g, out)
    click.echo(f"grant with {len(g.keys)} keys written to {out}")


@main.command()
@click.option("--grant", "grant_path", type=click.Path(exists=True), required=True)
@click.option("--lake", "lake_url", required=True)
@click.option("--ledger", "ledger_url", required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Where to write the report JSON.")
@click.option("--render-dir", type=click.Path(file_okay=False), default=None,
              help="Also write pie.svg and slash.svg here.")
@click.option("--window", "window_size", type=int, default=20, show_default=True)
def verify(grant_path: str, lake_url: str, ledger_url: str, out: str,
           render_dir: str | None, window_size: int) -> None:
    """Verify a disclosure against a lake and the ledger."""
    from tapestry.services.clients import HttpLakeClient, HttpLedgerClient

    g = workflows.load_grant(grant_path)
    report = workflows.verify_subject(
        g,
        HttpLakeClient(base_url=lake_url),
        HttpLedgerClient(base_url=ledger_url),
        window_size=window_size,
    )
    wire = workflows.report_to_wire(report)
    Path(out).write_text(json.dumps(wire, indent=2, sort_keys=True))
    if render_dir and report.svg_pie and report.svg_slash:
        directory = Path(render_dir)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "pie.svg").write_bytes(report.svg_pie)
        (directory / "slash.svg").write_bytes(report.svg_slash)
    click.echo(f"{report.verdict}: {len(report.items)} records, "
               f"{report.outlier_count} outlier windows; report {report.report_id}")
    if report.verdict != workflows.VERDICT_VERIFIED:
        sys.exit(2)


@main.command()
@click.option("--report", "report_path", type=click.Path(exists=True), required=True)
@click.option("--decision", type=click.Choice(workflows.VALID_DECISIONS), required=True)
@click.option("--note", default="")
@click.option("--log", "log_path", type=click.Path(dir_okay=False), required=True)
def decide(report_path: str, decision: str, note: str, log_path: str) -> None:
    """Record a human trust decision for a report."""
    report_id = json.loads(Path(report_path).read_text())["report_id"]
    log = workflows.DecisionLog(log_path)
    record = workflows.record_decision(log, report_id, decision, note)
    click.echo(f"decision #{record.seq} ({record.decision}) recorded for {report_id}")


@main.group()
def viz_cmd() -> None:
    """Render a visualization model to SVG."""


main.add_command(viz_cmd, name="viz")


def _render(kind: str, model_path: str, out: str, size: int) -> None:
    model = viz.model_from_json(Path(model_path).read_text())
    style = viz.RenderStyle(size=size)
    if kind == "pie":
        data = viz.render_pie(model, style)
    else:
        day_buckets = model.of_kind(model.kinds[0]) if len(model.kinds) == 1 \
            else model.of_kind("day")
        data = viz.render_slash(viz.VisualizationModel(buckets=tuple(day_buckets)), style)
    Path(out).write_bytes(data)
    click.echo(f"{kind} SVG written to {out}")


@viz_cmd.command("pie")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--size", type=int, default=480, show_default=True)
def viz_pie(model_path: str, out: str, size: int) -> None:
    """Concentric-ring rendering (interpersonal trust)."""
    _render("pie", model_path, out, size)


@viz_cmd.command("slash")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--size", type=int, default=480, show_default=True)
def viz_slash(model_path: str, out: str, size: int) -> None:
    """Per-period slash rendering (introspective trust)."""
    _render("slash", model_path, out, size)


@main.group()
def corpus() -> None:
    """Synthetic corpora."""


@corpus.command("synth")
@click.option("--users", type=int, default=50, show_default=True)
@click.option("--activities", type=int, default=400, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def corpus_synth(users: int, activities: int, seed: int, out: str) -> None:
    """Generate a topic-separated corpus as JSON lines."""
    cfg = CorpusConfig(users=users, activities_per_user=activities, seed=seed)
    feeds = generate_corpus(cfg)
    write_feeds(feeds, out)
    click.echo(f"{users} users x {activities} activities written to {out} "
               f"(vocabulary overlap {cfg.overlap:.0%})")


@main.group()
def serve() -> None:
    """Run a service."""


@serve.command("ledger")
@click.option("--port", type=int, default=8730, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--difficulty", type=int, default=12, show_default=True)
@click.option("--data", "data_path", type=click.Path(dir_okay=False), default=None,
              help="Append-only chain file (omit for in-memory).")
def serve_ledger(port: int, host: str, difficulty: int, data_path: str | None) -> None:
    """Run the proof-of-work ledger RPC."""
    import uvicorn

    from tapestry.ledger import Chain, ChainConfig, FileChainStore
    from tapestry.services.ledger_api import create_ledger_app

    store = FileChainStore(data_path) if data_path else None
    chain = Chain(ChainConfig(difficulty=difficulty), store=store)
    uvicorn.run(create_ledger_app(chain), host=host, port=port, log_level="warning")


@serve.command("lake")
@click.option("--port", type=int, default=8731, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ledger", "ledger_url", default=None,
              help="Ledger base URL (overrides the config file).")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Lake config JSON (env TAPESTRY_LAKE_* overrides it).")
def serve_lake(port: int, host: str, ledger_url: str | None,
               config_path: str | None) -> None:
    """Run a data-lake instance against a ledger."""
    import uvicorn

    from tapestry.datalake import DataLake, LakeConfig
    from tapestry.services.clients import HttpLedgerClient
    from tapestry.services.lake_api import create_lake_app

    config = LakeConfig.from_sources(config_path)
    ledger_url = ledger_url or config.ledger_endpoint
    if not ledger_url:
        raise click.ClickException(
            "no ledger endpoint: pass --ledger or set it in the config")
    lake = DataLake(HttpLedgerClient(base_url=ledger_url), config)
    lake.start_worker()
    try:
        uvicorn.run(create_lake_app(lake), host=host, port=port, log_level="warning")
    finally:
        lake.stop_worker()


@serve.command("verifier")
@click.option("--port", type=int, default=8732, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--lake", "lake_url", required=True)
@click.option("--ledger", "ledger_url", required=True)
@click.option("--decisions", "log_path", type=click.Path(dir_okay=False),
              default="decisions.jsonl", show_default=True)
@click.option("--static", "static_dir", type=click.Path(file_okay=False), default=None,
              help="Console build directory to serve at /.")
def serve_verifier(port: int, host: str, lake_url: str, ledger_url: str,
                   log_path: str, static_dir: str | None) -> None:
    """Run the verifier API (and, optionally, the console)."""
    import uvicorn

    from tapestry.services.clients import HttpLakeClient, HttpLedgerClient
    from tapestry.services.verifier_api import create_verifier_app
    from tapestry.workflows import DecisionLog

    app = create_verifier_app(
        HttpLakeClient(base_url=lake_url),
        HttpLedgerClient(base_url=ledger_url),
        DecisionLog(log_path),
        static_dir=static_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
