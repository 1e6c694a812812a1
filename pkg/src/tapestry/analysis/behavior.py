"""Behaviour modelling over activity embeddings.

Sliding windows of consecutive activities are averaged into window
embeddings; the mean of the earliest windows is the subject's behaviour
norm, and windows whose Euclidean distance to that norm exceeds a
mean + sigma_mult * stddev threshold are flagged as outliers.  A splicing
helper simulates account hijacking for evaluation, with precision/recall
scoring against the exact splice mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from tapestry.analysis.embedding import Embedder, HashEmbedder
from tapestry.analysis.text import preprocess
from tapestry.errors import (
    InsufficientDonor,
    InsufficientHistory,
    InvalidInput,
    InvalidNorm,
)

DEFAULT_WINDOW = 20
DEFAULT_BASELINE_FRACTION = 0.5
DEFAULT_SIGMA_MULT = 3.0


@dataclass(frozen=True)
class Activity:
    text: str
    time: int
    type: str = "twitter.text"


@dataclass(frozen=True)
class UserEmbeddingSeries:
    """Sliding-window embeddings for one subject's ordered feed."""

    window_starts: tuple[int, ...]   # Unix time of each window's first activity
    embeddings: np.ndarray           # (k - w + 1, dim)
    window_size: int
    activity_times: tuple[int, ...]  # times of the underlying k activities

    def __len__(self) -> int:
        return len(self.window_starts)


@dataclass(frozen=True)
class BehaviorNorm:
    mu: np.ndarray        # centroid of the baseline window embeddings
    threshold: float
    baseline_fraction: float
    baseline_count: int


def embed_feed(activities: list[Activity], embedder: Embedder | None = None) -> np.ndarray:
    if embedder is None:
        embedder = HashEmbedder()
    if not activities:
        return np.zeros((0, embedder.dim))
    return np.stack([embedder.embed_tokens(preprocess(a.text)) for a in activities])


def window_series(
    activities: list[Activity],
    w: int = DEFAULT_WINDOW,
    embedder: Embedder | None = None,
    activity_embeddings: np.ndarray | None = None,
) -> UserEmbeddingSeries:
    """All w-length sliding windows over the feed; each window embedding is
    the renormalised mean of its member activity embeddings."""
    k = len(activities)
    if w < 1:
        raise InvalidInput("window size must be >= 1")
    if k < w:
        raise InsufficientHistory(f"need at least {w} activities, have {k}")
    if activity_embeddings is None:
        activity_embeddings = embed_feed(activities, embedder)
    # summing each dimension in sorted order makes the mean exactly
    # invariant to activity order within a window
    means = np.empty((k - w + 1, activity_embeddings.shape[1]))
    for i in range(k - w + 1):
        means[i] = np.sort(activity_embeddings[i:i + w], axis=0).sum(axis=0) / w
    norms = np.linalg.norm(means, axis=1, keepdims=True)
    means = np.where(norms > 0, means / np.where(norms == 0, 1, norms), means)
    starts = tuple(int(activities[i].time) for i in range(k - w + 1))
    return UserEmbeddingSeries(
        window_starts=starts,
        embeddings=means,
        window_size=w,
        activity_times=tuple(int(a.time) for a in activities),
    )


def fit_norm(
    series: UserEmbeddingSeries,
    baseline_fraction: float = DEFAULT_BASELINE_FRACTION,
    sigma_mult: float = DEFAULT_SIGMA_MULT,
) -> BehaviorNorm:
    """Behaviour norm from the first fraction of windows.

    mu is the plain centroid of the baseline window embeddings; the
    outlier threshold is mean + sigma_mult * population-stddev of the
    baseline distances to mu.
    """
    count = len(series)
    if count == 0:
        raise InsufficientHistory("series is empty")
    if not 0.0 < baseline_fraction <= 1.0:
        raise InvalidInput("baseline_fraction must be in (0, 1]")
    n_base = math.ceil(baseline_fraction * count)
    if n_base < 2:
        raise InsufficientHistory(
            f"baseline of {n_base} windows is too small to fit a norm"
        )
    base = series.embeddings[:n_base]
    mu = base.mean(axis=0)
    distances = np.linalg.norm(base - mu, axis=1)
    threshold = float(distances.mean() + sigma_mult * distances.std())
    return BehaviorNorm(
        mu=mu,
        threshold=threshold,
        baseline_fraction=baseline_fraction,
        baseline_count=n_base,
    )


def distances_to_norm(series: UserEmbeddingSeries, norm: BehaviorNorm) -> np.ndarray:
    if series.embeddings.shape[1] != norm.mu.shape[0]:
        raise InvalidNorm(
            f"norm dimension {norm.mu.shape[0]} does not match series "
            f"dimension {series.embeddings.shape[1]}"
        )
    return np.linalg.norm(series.embeddings - norm.mu, axis=1)


def detect_anomalies(
    series: UserEmbeddingSeries, norm: BehaviorNorm
) -> list[tuple[int, float, bool]]:
    """(window index, distance to norm, is_outlier) for every window."""
    distances = distances_to_norm(series, norm)
    return [
        (i, float(d), bool(d > norm.threshold))
        for i, d in enumerate(distances)
    ]


def splice_hijack(
    feed: list[Activity],
    donor_feed: list[Activity],
    f_h: float,
    rng_seed: int,
    start_range: tuple[int, int] | None = None,
) -> tuple[list[Activity], list[bool]]:
    """Replace a contiguous fraction of the feed with donor content.

    The run length is ceil(f_h * k); the start index is drawn from the
    seeded RNG (optionally restricted to start_range, e.g. to keep the
    baseline region clean in evaluations).  Replaced items keep their
    original timestamps and type; only the text is the donor's.  Returns
    the spliced feed and a per-position ground-truth mask.
    """
    k = len(feed)
    if not 0.0 < f_h < 1.0:
        raise InvalidInput("f_h must be in (0, 1)")
    m = math.ceil(f_h * k)
    if m > len(donor_feed):
        raise InsufficientDonor(
            f"donor feed has {len(donor_feed)} activities, need {m}"
        )
    if m > k:
        raise InvalidInput("splice longer than the feed")
    rng = np.random.default_rng(rng_seed)
    lo, hi = 0, k - m
    if start_range is not None:
        lo, hi = max(lo, start_range[0]), min(hi, start_range[1])
        if lo > hi:
            raise InvalidInput("start_range admits no valid splice start")
    start = int(rng.integers(lo, hi + 1))
    donor_start = int(rng.integers(0, len(donor_feed) - m + 1))
    spliced = list(feed)
    mask = [False] * k
    for i in range(m):
        original = feed[start + i]
        donor = donor_feed[donor_start + i]
        spliced[start + i] = Activity(text=donor.text, time=original.time, type=original.type)
        mask[start + i] = True
    return spliced, mask


def mask_to_window_truth(mask: list[bool], w: int) -> list[bool]:
    """Window-level ground truth: anomalous when a strict majority of the
    window's members are spliced."""
    k = len(mask)
    if k < w:
        raise InvalidInput("mask shorter than one window")
    counts = np.convolve(np.asarray(mask, dtype=int), np.ones(w, dtype=int), "valid")
    return [bool(c > w / 2) for c in counts]


def score_detection(
    flags: list[bool], mask: list[bool], w: int
) -> tuple[float, float, float]:
    """Precision/recall/F1 of window flags against the splice mask."""
    truth = mask_to_window_truth(mask, w)
    if len(flags) != len(truth):
        raise InvalidInput(
            f"{len(flags)} window flags vs {len(truth)} windows implied by the mask"
        )
    tp = sum(1 for f, t in zip(flags, truth) if f and t)
    fp = sum(1 for f, t in zip(flags, truth) if f and not t)
    fn = sum(1 for f, t in zip(flags, truth) if not f and t)
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    return precision, recall, f1
