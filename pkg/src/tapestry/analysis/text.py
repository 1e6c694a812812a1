"""Activity-text preprocessing: cleanup, tokenisation, stop words, stemming.

The pipeline, in order: drop URLs / @mentions / #hashtags wholesale,
lowercase, strip everything non-alphanumeric, split on whitespace, drop
stop words, then apply the light suffix-stemming rules tabulated in
docs/formats.md.  Deliberately dependency-free so tokenisation is stable
across machines and releases.
"""

from __future__ import annotations

import re

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#\w+")
_NON_ALNUM_RE = re.compile(r"[^0-9a-z\s]+")

# compact English stop list; frozen here so results never drift with an
# external package version
STOP_WORDS = frozenset("""
a about above after again against all am an and any are as at be because
been before being below between both but by can did do does doing down
during each few for from further had has have having he her here hers
herself him himself his how i if in into is it its itself just me more
most my myself no nor not now of off on once only or other our ours
ourselves out over own same she should so some such than that the their
theirs them themselves then there these they this those through to too
under until up very was we were what when where which while who whom why
will with you your yours yourself yourselves
""".split())

_MIN_STEM_LEN = 2


def stem(word: str) -> str:
    """Light suffix stemming: -ing, -ed, -ly, then plural -s (never -ss)."""
    if len(word) > 4 and word.endswith("ing"):
        return word[:-3]
    if len(word) > 3 and word.endswith("ed"):
        return word[:-2]
    if len(word) > 3 and word.endswith("ly"):
        return word[:-2]
    if len(word) > _MIN_STEM_LEN and word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


def preprocess(text: str) -> list[str]:
    """Clean one activity text down to its token list (possibly empty)."""
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = _HASHTAG_RE.sub(" ", text)
    text = text.lower()
    text = _NON_ALNUM_RE.sub(" ", text)
    tokens = [t for t in text.split() if t and t not in STOP_WORDS]
    return [stem(t) for t in tokens]
