"""Visual gists of disclosed evidence: calendar model, pie and slash SVG.

The model aggregates a window series and its behaviour norm into contiguous
calendar buckets (day / week / month, UTC).  Two renderers turn a model
into deterministic, text-free SVG:

* pie - concentric rings, one per granularity with the finest innermost;
  segment tone encodes volume and coherence (darker = more evidence,
  white = none).
* slash - one glyph per bucket of a single granularity, laid out seven to
  a row with a wider gap every four rows; forward slash = normal activity,
  backslash = anomalous, blank = none; tone encodes volume.

Rendering is a pure function of (model, style): identical inputs give
byte-identical SVG, which the golden-file tests rely on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone

from tapestry.analysis.behavior import BehaviorNorm, UserEmbeddingSeries, detect_anomalies
from tapestry.errors import InvalidInput, InvalidRange

DAY = 86400
#: days since epoch of the first Monday (1970-01-05)
_MONDAY_OFFSET = 4

GRANULARITIES = ("day", "week", "month")


@dataclass(frozen=True)
class Bucket:
    start: int          # Unix seconds UTC of the period start
    kind: str           # day | week | month
    count: int          # activities in the period
    coherence: float    # 1 - clamp(mean distance / threshold, 0, 1)
    anomaly: bool       # any window in the period flagged


@dataclass(frozen=True)
class VisualizationModel:
    buckets: tuple[Bucket, ...]   # ordered, contiguous per granularity

    def of_kind(self, kind: str) -> list[Bucket]:
        return [b for b in self.buckets if b.kind == kind]

    @property
    def kinds(self) -> list[str]:
        seen = []
        for b in self.buckets:
            if b.kind not in seen:
                seen.append(b.kind)
        return seen


@dataclass(frozen=True)
class RenderStyle:
    size: int = 480          # pie edge length, px
    cell: int = 24           # slash cell edge, px
    margin: int = 12
    background: str = "#ffffff"
    # grayscale ramp: tone for "no evidence" and the darkest tone
    blank_gray: int = 255
    dark_gray: int = 40


# --- calendar bucketing -------------------------------------------------------


def bucket_start(t: int, kind: str) -> int:
    if kind == "day":
        return (t // DAY) * DAY
    if kind == "week":
        day_idx = t // DAY
        return (day_idx - ((day_idx - _MONDAY_OFFSET) % 7)) * DAY
    if kind == "month":
        dt = datetime.fromtimestamp(t, tz=timezone.utc)
        return int(datetime(dt.year, dt.month, 1, tzinfo=timezone.utc).timestamp())
    raise InvalidInput(f"unknown granularity {kind!r}")


def next_bucket_start(start: int, kind: str) -> int:
    if kind == "day":
        return start + DAY
    if kind == "week":
        return start + 7 * DAY
    if kind == "month":
        dt = datetime.fromtimestamp(start, tz=timezone.utc)
        year, month = (dt.year + 1, 1) if dt.month == 12 else (dt.year, dt.month + 1)
        return int(datetime(year, month, 1, tzinfo=timezone.utc).timestamp())
    raise InvalidInput(f"unknown granularity {kind!r}")


def _bucket_spans(start: int, end: int, kind: str) -> list[tuple[int, int]]:
    spans = []
    cursor = bucket_start(start, kind)
    while cursor < end:
        nxt = next_bucket_start(cursor, kind)
        spans.append((cursor, nxt))
        cursor = nxt
    return spans


def build_model(
    series: UserEmbeddingSeries,
    norm: BehaviorNorm,
    start: int,
    end: int,
    granularities: tuple[str, ...] = ("day", "week"),
) -> VisualizationModel:
    """Aggregate activities and anomaly flags into calendar buckets.

    Buckets are contiguous over [start, end) for every requested
    granularity.  Windows are assigned to the bucket containing their
    start time; a bucket with activities but no windows renders as fully
    coherent (no deviation evidence), an empty bucket as blank.
    """
    if end <= start:
        raise InvalidRange("empty time range")
    for kind in granularities:
        if kind not in GRANULARITIES:
            raise InvalidInput(f"unknown granularity {kind!r}")
    detections = detect_anomalies(series, norm)
    buckets: list[Bucket] = []
    for kind in granularities:
        for lo, hi in _bucket_spans(start, end, kind):
            count = sum(1 for t in series.activity_times if lo <= t < hi)
            dists = [d for (i, d, _) in detections if lo <= series.window_starts[i] < hi]
            flagged = any(o for (i, _, o) in detections if lo <= series.window_starts[i] < hi)
            if dists:
                mean_dist = sum(dists) / len(dists)
                if norm.threshold > 0:
                    coherence = 1.0 - min(max(mean_dist / norm.threshold, 0.0), 1.0)
                else:
                    coherence = 1.0 if mean_dist == 0 else 0.0
            else:
                coherence = 1.0 if count > 0 else 0.0
            buckets.append(Bucket(lo, kind, count, round(coherence, 6), flagged))
    return VisualizationModel(buckets=tuple(buckets))


# --- model JSON ---------------------------------------------------------------


def model_to_json(model: VisualizationModel) -> str:
    return json.dumps(
        {
            "buckets": [
                {
                    "start": b.start,
                    "kind": b.kind,
                    "count": b.count,
                    "coherence": b.coherence,
                    "anomaly": b.anomaly,
                }
                for b in model.buckets
            ]
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def model_from_json(text: str) -> VisualizationModel:
    try:
        raw = json.loads(text)
        return VisualizationModel(
            buckets=tuple(
                Bucket(int(b["start"]), b["kind"], int(b["count"]),
                       float(b["coherence"]), bool(b["anomaly"]))
                for b in raw["buckets"]
            )
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed model JSON: {exc}") from exc


# --- shading ------------------------------------------------------------------


def _gray(style: RenderStyle, value: float) -> str:
    """value in [0,1] -> grayscale fill; darker means more evidence."""
    value = min(max(value, 0.0), 1.0)
    level = round(style.blank_gray - value * (style.blank_gray - style.dark_gray))
    return f"#{level:02x}{level:02x}{level:02x}"


def _segment_value(bucket: Bucket, max_count: int) -> float:
    if bucket.count == 0 or max_count == 0:
        return 0.0
    volume = bucket.count / max_count
    return volume * (0.3 + 0.7 * bucket.coherence)


# --- pie ----------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _annular_sector(cx: float, cy: float, r_in: float, r_out: float,
                    a0: float, a1: float, fill: str) -> str:
    """One ring segment; angles in degrees, 0 at 12 o'clock, clockwise."""
    def point(radius: float, angle: float) -> tuple[float, float]:
        rad = math.radians(angle - 90.0)
        return cx + radius * math.cos(rad), cy + radius * math.sin(rad)

    if a1 - a0 >= 360.0:
        # full annulus: outer and inner circle with even-odd fill
        return (
            f'<path d="M {_fmt(cx)} {_fmt(cy - r_out)} '
            f"A {_fmt(r_out)} {_fmt(r_out)} 0 1 1 {_fmt(cx - 0.01)} {_fmt(cy - r_out)} Z "
            f"M {_fmt(cx)} {_fmt(cy - r_in)} "
            f"A {_fmt(r_in)} {_fmt(r_in)} 0 1 0 {_fmt(cx - 0.01)} {_fmt(cy - r_in)} Z\" "
            f'fill="{fill}" fill-rule="evenodd" stroke="#cccccc" stroke-width="0.5"/>'
        )
    large = 1 if (a1 - a0) > 180.0 else 0
    x1, y1 = point(r_out, a0)
    x2, y2 = point(r_out, a1)
    x3, y3 = point(r_in, a1)
    x4, y4 = point(r_in, a0)
    return (
        f'<path d="M {_fmt(x1)} {_fmt(y1)} '
        f"A {_fmt(r_out)} {_fmt(r_out)} 0 {large} 1 {_fmt(x2)} {_fmt(y2)} "
        f"L {_fmt(x3)} {_fmt(y3)} "
        f"A {_fmt(r_in)} {_fmt(r_in)} 0 {large} 0 {_fmt(x4)} {_fmt(y4)} Z\" "
        f'fill="{fill}" stroke="#cccccc" stroke-width="0.5"/>'
    )


def render_pie(model: VisualizationModel, style: RenderStyle | None = None) -> bytes:
    """Concentric time rings; the finest granularity is the innermost ring."""
    style = style or RenderStyle()
    kinds = [k for k in GRANULARITIES if model.of_kind(k)]
    if not kinds:
        raise InvalidInput("model has no buckets")
    size = style.size
    cx = cy = size / 2.0
    hole = size * 0.08
    ring_width = (size / 2.0 - style.margin - hole) / len(kinds)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="{style.background}"/>',
    ]
    for level, kind in enumerate(kinds):
        buckets = model.of_kind(kind)
        max_count = max(b.count for b in buckets)
        r_in = hole + level * ring_width
        r_out = hole + (level + 1) * ring_width
        step = 360.0 / len(buckets)
        for i, bucket in enumerate(buckets):
            fill = _gray(style, _segment_value(bucket, max_count))
            parts.append(
                _annular_sector(cx, cy, r_in, r_out, i * step, (i + 1) * step, fill)
            )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


# --- slash --------------------------------------------------------------------


def render_slash(model: VisualizationModel, style: RenderStyle | None = None) -> bytes:
    """One glyph per bucket: / normal, \\ anomalous, blank for no activity.

    Rows of seven buckets (one week per row when the model is daily);
    a wider gap separates four-row panels.
    """
    style = style or RenderStyle()
    kinds = model.kinds
    if len(kinds) != 1:
        raise InvalidInput("slash rendering needs a single-granularity model")
    buckets = model.of_kind(kinds[0])
    max_count = max((b.count for b in buckets), default=0)
    cell = style.cell
    margin = style.margin
    panel_gap = cell // 2
    cols = 7
    rows = math.ceil(len(buckets) / cols)
    panels = (rows - 1) // 4 if rows else 0
    width = 2 * margin + cols * cell
    height = 2 * margin + rows * cell + panels * panel_gap
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="{style.background}"/>',
    ]
    inset = cell * 0.2
    for i, bucket in enumerate(buckets):
        if bucket.count == 0:
            continue
        row, col = divmod(i, cols)
        x0 = margin + col * cell
        y0 = margin + row * cell + (row // 4) * panel_gap
        volume = bucket.count / max_count if max_count else 0.0
        stroke = _gray(style, 0.25 + 0.75 * volume)
        if bucket.anomaly:  # backslash: top-left to bottom-right
            x1, y1 = x0 + inset, y0 + inset
            x2, y2 = x0 + cell - inset, y0 + cell - inset
        else:               # forward slash: bottom-left to top-right
            x1, y1 = x0 + inset, y0 + cell - inset
            x2, y2 = x0 + cell - inset, y0 + inset
        parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{_fmt(cell * 0.14)}" stroke-linecap="round"/>'
        )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")
