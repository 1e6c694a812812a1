"""Synthetic topic-separated corpora and the JSON-lines feed format.

Feeds are exchanged as JSON lines of {"user": str, "time": int, "text": str}.

Each synthetic user gets a private Zipf-weighted vocabulary plus a small
pool of common words shared by everyone (the configurable vocabulary
overlap), and cycles daily through a handful of personal topic modes
(boosted word subsets).  The rotation gives a single user bounded, low
dimensional day-to-day variation - wide enough that an outlier threshold
fit on their own history sits well above their normal spread, while
another user's content still lands far outside it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from tapestry.analysis.behavior import Activity
from tapestry.errors import InvalidInput


@dataclass(frozen=True)
class CorpusConfig:
    users: int = 50
    activities_per_user: int = 400
    vocab_size: int = 120           # words private to each user
    shared_vocab_size: int = 24     # words common to all users (the overlap)
    shared_mass: float = 0.20       # probability mass spent on shared words
    topic_modes: int = 3            # personal topic modes, rotated daily
    focus_size: int = 30            # words boosted per mode
    focus_gain: float = 20.0        # boost factor on focused words
    words_per_activity: tuple[int, int] = (4, 8)    # inclusive range
    start_time: int = 1_600_000_000
    spacing_seconds: int = 3600     # one activity per hour
    seed: int = 7

    @property
    def overlap(self) -> float:
        return self.shared_vocab_size / (self.shared_vocab_size + self.vocab_size)


def _word(prefix: str, idx: int) -> str:
    # trailing letter keeps generated words clear of the stemming suffixes
    return f"{prefix}{idx}x"


def generate_corpus(config: CorpusConfig | None = None) -> dict[str, list[Activity]]:
    """Deterministic synthetic corpus keyed by user name."""
    cfg = config or CorpusConfig()
    if cfg.users < 2:
        raise InvalidInput("need at least two users (splicing needs a donor)")
    if not 0.0 <= cfg.shared_mass < 1.0:
        raise InvalidInput("shared_mass must be in [0, 1)")
    rng = np.random.default_rng(cfg.seed)
    shared = np.array([_word("common", i) for i in range(cfg.shared_vocab_size)])
    shared_w = 1.0 / np.arange(1, cfg.shared_vocab_size + 1)
    shared_w = cfg.shared_mass * shared_w / shared_w.sum()
    feeds: dict[str, list[Activity]] = {}
    for u in range(cfg.users):
        private = np.array([_word(f"u{u}t", i) for i in range(cfg.vocab_size)])
        private_w = 1.0 / np.arange(1, cfg.vocab_size + 1)
        private_w = private_w[rng.permutation(cfg.vocab_size)]
        private_w = (1.0 - cfg.shared_mass) * private_w / private_w.sum()
        vocab = np.concatenate([private, shared])
        base = np.concatenate([private_w, shared_w])
        modes = []
        for _ in range(cfg.topic_modes):
            focus = rng.choice(cfg.vocab_size, size=cfg.focus_size, replace=False)
            day_w = base.copy()
            day_w[focus] *= cfg.focus_gain
            day_w /= day_w.sum()
            modes.append(day_w)
        feed = []
        for i in range(cfg.activities_per_user):
            t = cfg.start_time + i * cfg.spacing_seconds
            day_w = modes[(t // 86400) % cfg.topic_modes]
            n_words = int(rng.integers(cfg.words_per_activity[0],
                                       cfg.words_per_activity[1] + 1))
            words = rng.choice(vocab, size=n_words, replace=True, p=day_w)
            feed.append(Activity(text=" ".join(words), time=t, type="twitter.text"))
        feeds[f"user{u:03d}"] = feed
    return feeds


# --- JSON-lines feed format ---------------------------------------------------

def write_feeds(feeds: dict[str, list[Activity]], path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for user, feed in feeds.items():
            for activity in feed:
                fh.write(json.dumps(
                    {"user": user, "time": activity.time, "text": activity.text},
                    sort_keys=True,
                ))
                fh.write("\n")


def read_feeds(path: str | Path) -> dict[str, list[Activity]]:
    feeds: dict[str, list[Activity]] = {}
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            feeds.setdefault(raw["user"], []).append(
                Activity(text=raw["text"], time=int(raw["time"]),
                         type=raw.get("type", "twitter.text"))
            )
    for feed in feeds.values():
        feed.sort(key=lambda a: a.time)
    return feeds
