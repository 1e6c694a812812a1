"""Subject and verifier workflows over the lake and ledger endpoints.

The subject side turns raw activities into signed, sealed evidence and
submits it; grants disclose exactly the derived keys for a requested
window and type set.  The verifier side runs the per-record sequence -
validate signature, compute hashes, fetch the anchored hash, compare,
decrypt - then fits the behaviour norm, flags anomalies, and builds the
visualization model.  The verdict is only ever evidence for a human: the
report records everything and decides nothing beyond Verified/Rejected.
"""

from __future__ import annotations

import hashlib
import json
import time as _time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from tapestry import crypto, records, viz
from tapestry.analysis.behavior import (
    Activity,
    detect_anomalies,
    fit_norm,
    window_series,
)
from tapestry.analysis.embedding import Embedder
from tapestry.crypto import SubjectIdentity, day_index
from tapestry.errors import InsufficientHistory, InvalidInput, WrongKey

SIGNATURE_OK = "SignatureOk"
SIGNATURE_FAIL = "SignatureFail"
ANCHOR_OK = "AnchorOk"
ANCHOR_MISMATCH = "AnchorMismatch"
ANCHOR_MISSING = "AnchorMissing"
DECRYPT_OK = "DecryptOk"
DECRYPT_WRONG_KEY = "WrongKey"

VERDICT_VERIFIED = "Verified"
VERDICT_REJECTED = "Rejected"


# --- disclosure grants --------------------------------------------------------

@dataclass(frozen=True)
class GrantKey:
    day: int
    activity_type: str
    ek: bytes


@dataclass(frozen=True)
class DisclosureGrant:
    pk: bytes
    start: int
    end: int
    activity_types: tuple[str, ...]
    keys: tuple[GrantKey, ...]

    def key_for(self, time_s: int, activity_type: str) -> bytes | None:
        day = day_index(time_s)
        for key in self.keys:
            if key.day == day and key.activity_type == activity_type:
                return key.ek
        return None


def grant_disclosure(
    identity: SubjectIdentity,
    start: int,
    end: int,
    activity_types: tuple[str, ...] | list[str],
) -> DisclosureGrant:
    """Derive exactly the keys for each (day, type) bucket intersecting the
    window - nothing outside it is ever derivable from the grant."""
    if end < start:
        raise InvalidInput("grant window end must be >= start")
    if not activity_types:
        raise InvalidInput("grant needs at least one activity type")
    keys = []
    for day in range(day_index(start), day_index(end) + 1):
        for activity_type in activity_types:
            derived = crypto.derive_key(identity.seed, identity.pk, day, activity_type)
            keys.append(GrantKey(day=day, activity_type=activity_type, ek=derived.ek))
    return DisclosureGrant(
        pk=identity.pk,
        start=int(start),
        end=int(end),
        activity_types=tuple(activity_types),
        keys=tuple(keys),
    )


def grant_to_wire(grant: DisclosureGrant) -> dict:
    return {
        "pk": grant.pk.hex(),
        "from": grant.start,
        "to": grant.end,
        "activity_types": list(grant.activity_types),
        "keys": [
            {"day_index": k.day, "activity_type": k.activity_type, "ek": k.ek.hex()}
            for k in grant.keys
        ],
    }


def grant_from_wire(raw: dict) -> DisclosureGrant:
    try:
        return DisclosureGrant(
            pk=bytes.fromhex(raw["pk"]),
            start=int(raw["from"]),
            end=int(raw["to"]),
            activity_types=tuple(raw["activity_types"]),
            keys=tuple(
                GrantKey(int(k["day_index"]), k["activity_type"], bytes.fromhex(k["ek"]))
                for k in raw["keys"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed grant: {exc}") from exc


def save_grant(grant: DisclosureGrant, path: str | Path) -> None:
    Path(path).write_text(json.dumps(grant_to_wire(grant), indent=2))


def load_grant(path: str | Path) -> DisclosureGrant:
    return grant_from_wire(json.loads(Path(path).read_text()))


# --- subject ingestion ----------------------------------------------------------

@dataclass
class IngestReport:
    ids: list[bytes] = field(default_factory=list)       # accepted, feed order
    errors: list[tuple[int, str]] = field(default_factory=list)  # (position, reason)


def subject_ingest(
    identity: SubjectIdentity,
    feed: list[Activity],
    lake,
    embedder: Embedder,
    tags: tuple[str, ...] = (),
) -> IngestReport:
    """Preprocess, embed, seal, sign and submit each activity in order.

    Lake rejections are surfaced per item; the rest of the feed still goes
    through.
    """
    from tapestry.analysis.text import preprocess

    report = IngestReport()
    for position, activity in enumerate(feed):
        vector = embedder.embed_tokens(preprocess(activity.text))
        te = records.make_evidence(
            identity, activity.time, activity.type, vector, tags=tags
        )
        try:
            report.ids.append(lake.submit(te))
        except Exception as exc:
            report.errors.append((position, str(exc)))
    return report


# --- verification ---------------------------------------------------------------

@dataclass
class ItemReport:
    id: bytes
    time: int
    activity_type: str
    signature: str
    anchor: str
    decrypt: str
    distance: float | None = None
    outlier: bool | None = None


@dataclass
class VerificationReport:
    report_id: str
    pk: bytes
    start: int
    end: int
    activity_types: tuple[str, ...]
    items: list[ItemReport]
    verdict: str
    steps: list[str]
    model: viz.VisualizationModel | None = None
    svg_pie: bytes | None = None
    svg_slash: bytes | None = None
    window_size: int = 0
    outlier_count: int = 0
    decision: dict | None = None


def report_to_wire(report: VerificationReport) -> dict:
    return {
        "report_id": report.report_id,
        "pk": report.pk.hex(),
        "window": {"from": report.start, "to": report.end},
        "activity_types": list(report.activity_types),
        "items": [
            {
                "id": item.id.hex(),
                "time": item.time,
                "type": item.activity_type,
                "signature": item.signature,
                "anchor": item.anchor,
                "decrypt": item.decrypt,
                "distance": item.distance,
                "outlier": item.outlier,
            }
            for item in report.items
        ],
        "verdict": report.verdict,
        "steps": list(report.steps),
        "model": json.loads(viz.model_to_json(report.model)) if report.model else None,
        "svg": {
            "pie": report.svg_pie.decode("utf-8") if report.svg_pie else None,
            "slash": report.svg_slash.decode("utf-8") if report.svg_slash else None,
        },
        "window_size": report.window_size,
        "outlier_count": report.outlier_count,
        "decision": report.decision,
    }


def _report_id(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(canon).hexdigest()[:16]


def verify_subject(
    grant: DisclosureGrant,
    lake,
    ledger,
    window_size: int = 20,
    baseline_fraction: float = 0.5,
    sigma_mult: float = 3.0,
    granularities: tuple[str, ...] = ("day", "week"),
    render: bool = True,
) -> VerificationReport:
    """Run the verification sequence against a lake and a ledger.

    Per record, in order: validate the signature, compute its metadata and
    payload hashes, request the anchored hash from the ledger, compare,
    decrypt with the granted key.  Only if every record passes all checks
    is the behaviour norm fitted and the visual model built; any failure
    rejects the whole disclosure.
    """
    steps: list[str] = []
    disclosed = lake.query_wire(
        pk=grant.pk, start=grant.start, end=grant.end, types=grant.activity_types
    )
    tes = [records.te_from_wire(raw) for raw in disclosed]
    tes.sort(key=lambda te: (te.time, records.evidence_id(te)))

    items: list[ItemReport] = []
    vectors: list[np.ndarray | None] = []
    for i, te in enumerate(tes):
        steps.append(f"te[{i}].signature")
        sig_ok = records.verify_evidence_signature(te) and te.pk == grant.pk

        steps.append(f"te[{i}].hash")
        id_ = records.evidence_id(te)
        h = records.evidence_hash(te)

        steps.append(f"te[{i}].ledger")
        anchored = ledger.fetch_wire(id_)

        steps.append(f"te[{i}].compare")
        if anchored is None:
            anchor_status = ANCHOR_MISSING
        elif anchored == h:
            anchor_status = ANCHOR_OK
        else:
            anchor_status = ANCHOR_MISMATCH

        steps.append(f"te[{i}].decrypt")
        ek = grant.key_for(te.time, te.activity_type)
        vector = None
        if ek is None:
            decrypt_status = DECRYPT_WRONG_KEY
        else:
            try:
                plaintext = crypto.open_box(ek, te.cdata)
                vector = records.decode_embedding(plaintext)
                decrypt_status = DECRYPT_OK
            except WrongKey:
                decrypt_status = DECRYPT_WRONG_KEY
        vectors.append(vector)
        items.append(
            ItemReport(
                id=id_,
                time=te.time,
                activity_type=te.activity_type,
                signature=SIGNATURE_OK if sig_ok else SIGNATURE_FAIL,
                anchor=anchor_status,
                decrypt=decrypt_status,
            )
        )

    all_ok = all(
        item.signature == SIGNATURE_OK
        and item.anchor == ANCHOR_OK
        and item.decrypt == DECRYPT_OK
        for item in items
    )
    verdict = VERDICT_VERIFIED if (all_ok and items) else VERDICT_REJECTED

    model = None
    svg_pie = svg_slash = None
    outlier_count = 0
    if all_ok and items:
        steps.append("visualize")
        try:
            activities = [Activity(text="", time=te.time, type=te.activity_type)
                          for te in tes]
            series = window_series(
                activities, window_size,
                activity_embeddings=np.stack([v for v in vectors]),
            )
            norm = fit_norm(series, baseline_fraction, sigma_mult)
        except InsufficientHistory:
            series = norm = None  # too little evidence to model behaviour
        if series is not None:
            detections = detect_anomalies(series, norm)
            for window_index, distance, outlier in detections:
                if outlier:
                    outlier_count += 1
                # attribute each window's result to its first member record
                item = items[window_index]
                item.distance = round(distance, 6)
                item.outlier = outlier
            model = viz.build_model(
                series, norm, start=grant.start, end=grant.end + 1,
                granularities=granularities,
            )
            if render:
                day_model = viz.VisualizationModel(
                    buckets=tuple(b for b in model.buckets if b.kind == "day")
                )
                svg_pie = viz.render_pie(model)
                svg_slash = viz.render_slash(day_model)

    report = VerificationReport(
        report_id="",
        pk=grant.pk,
        start=grant.start,
        end=grant.end,
        activity_types=grant.activity_types,
        items=items,
        verdict=verdict,
        steps=steps,
        model=model,
        svg_pie=svg_pie,
        svg_slash=svg_slash,
        window_size=window_size,
        outlier_count=outlier_count,
    )
    wire = report_to_wire(report)
    wire.pop("decision")
    report.report_id = _report_id(wire)
    return report


# --- the decision log -----------------------------------------------------------

@dataclass(frozen=True)
class DecisionRecord:
    report_id: str
    decision: str   # trust | distrust | undecided
    note: str
    recorded_at: int
    seq: int
    current: bool = True


VALID_DECISIONS = ("trust", "distrust", "undecided")


class DecisionLog:
    """Append-only JSONL log of human trust decisions.

    Several decisions may exist for one report; the latest is current.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def record(self, report_id: str, decision: str, note: str = "") -> DecisionRecord:
        if decision not in VALID_DECISIONS:
            raise InvalidInput(f"decision must be one of {VALID_DECISIONS}")
        entries = self.load()
        seq = len(entries)
        record = DecisionRecord(
            report_id=report_id,
            decision=decision,
            note=note,
            recorded_at=int(_time.time()),
            seq=seq,
        )
        with self.path.open("a") as fh:
            fh.write(json.dumps({
                "report_id": record.report_id,
                "decision": record.decision,
                "note": record.note,
                "recorded_at": record.recorded_at,
                "seq": record.seq,
            }, sort_keys=True))
            fh.write("\n")
        return record

    def load(self) -> list[DecisionRecord]:
        if not self.path.exists():
            return []
        entries: list[DecisionRecord] = []
        latest: dict[str, int] = {}
        with self.path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                raw = json.loads(line)
                entries.append(DecisionRecord(
                    report_id=raw["report_id"],
                    decision=raw["decision"],
                    note=raw.get("note", ""),
                    recorded_at=int(raw["recorded_at"]),
                    seq=int(raw["seq"]),
                    current=False,
                ))
                latest[raw["report_id"]] = int(raw["seq"])
        return [
            replace(e, current=(latest[e.report_id] == e.seq))
            for e in entries
        ]


def record_decision(log: DecisionLog, report: VerificationReport | str,
                    decision: str, note: str = "") -> DecisionRecord:
    report_id = report if isinstance(report, str) else report.report_id
    return log.record(report_id, decision, note)
