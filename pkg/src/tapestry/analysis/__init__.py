"""Activity analysis: text cleanup, embeddings, windows, anomaly flags."""

from tapestry.analysis.behavior import (
    Activity,
    BehaviorNorm,
    UserEmbeddingSeries,
    detect_anomalies,
    fit_norm,
    score_detection,
    splice_hijack,
    window_series,
)
from tapestry.analysis.embedding import EMBEDDING_DIM, HashEmbedder, embed_activity
from tapestry.analysis.text import preprocess

__all__ = [
    "Activity",
    "BehaviorNorm",
    "EMBEDDING_DIM",
    "HashEmbedder",
    "UserEmbeddingSeries",
    "detect_anomalies",
    "embed_activity",
    "fit_norm",
    "preprocess",
    "score_detection",
    "splice_hijack",
    "window_series",
]
