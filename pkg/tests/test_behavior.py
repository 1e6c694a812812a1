"""Windows, behaviour norms, anomaly detection, splicing, scoring."""

from __future__ import annotations

import math

import numpy as np
import pytest

from tapestry.analysis.behavior import (
    Activity,
    detect_anomalies,
    fit_norm,
    mask_to_window_truth,
    score_detection,
    splice_hijack,
    window_series,
)
from tapestry.analysis.corpus import CorpusConfig, generate_corpus
from tapestry.errors import (
    InsufficientDonor,
    InsufficientHistory,
    InvalidInput,
    InvalidNorm,
)


def feed(texts: list[str], start: int = 1_600_000_000, step: int = 3600) -> list[Activity]:
    return [Activity(text, start + i * step) for i, text in enumerate(texts)]


class TestWindowSeries:
    def test_k_equals_w_single_window(self, embedder):
        series = window_series(feed(["alpha beta"] * 4), 4, embedder=embedder)
        assert len(series) == 1

    def test_identical_activities_identical_windows(self, embedder):
        series = window_series(feed(["alpha beta"] * 10), 3, embedder=embedder)
        assert len(series) == 8
        for row in series.embeddings[1:]:
            assert (row == series.embeddings[0]).all()

    def test_against_brute_force_recomputation(self, embedder):
        texts = [f"w{i}x common{i % 3}x" for i in range(10)]
        activities = feed(texts)
        series = window_series(activities, 3, embedder=embedder)
        assert len(series) == 8
        from tapestry.analysis.text import preprocess
        vectors = np.stack([embedder.embed_tokens(preprocess(t)) for t in texts])
        for i in range(8):
            mean = vectors[i:i + 3].mean(axis=0)
            norm = np.linalg.norm(mean)
            expected = mean / norm if norm > 0 else mean
            np.testing.assert_allclose(series.embeddings[i], expected, atol=1e-12)

    def test_window_starts_and_activity_times(self, embedder):
        activities = feed(["alpha"] * 5)
        series = window_series(activities, 2, embedder=embedder)
        assert series.window_starts == tuple(a.time for a in activities[:4])
        assert series.activity_times == tuple(a.time for a in activities)

    def test_too_short_history(self, embedder):
        with pytest.raises(InsufficientHistory):
            window_series(feed(["alpha"] * 3), 4, embedder=embedder)

    def test_exact_order_invariance_within_window(self, embedder):
        texts = [f"token{i}x extra{i % 2}x" for i in range(6)]
        base = window_series(feed(texts), 6, embedder=embedder)
        rng = np.random.default_rng(5)
        for _ in range(4):
            perm = rng.permutation(6)
            shuffled = feed([texts[j] for j in perm])
            other = window_series(shuffled, 6, embedder=embedder)
            assert (base.embeddings == other.embeddings).all()


class TestFitNorm:
    def test_zero_variance_baseline(self, embedder):
        series = window_series(feed(["alpha beta"] * 8), 2, embedder=embedder)
        norm = fit_norm(series)
        assert norm.threshold == 0.0
        assert (norm.mu == series.embeddings[0]).all()

    def test_two_cluster_centroid_oracle(self):
        # baseline entirely in cluster A; mu must be the cluster-A centroid
        rng = np.random.default_rng(3)
        a = np.array([1.0] + [0.0] * 63)
        b = np.array([0.0, 1.0] + [0.0] * 62)
        cluster_a = np.stack([a + rng.normal(0, 0.01, 64) for _ in range(10)])
        cluster_b = np.stack([b + rng.normal(0, 0.01, 64) for _ in range(10)])
        vectors = np.vstack([cluster_a, cluster_b])
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
        activities = feed(["x"] * 20)
        series = window_series(activities, 1, activity_embeddings=vectors)
        norm = fit_norm(series, baseline_fraction=0.5)
        centroid = series.embeddings[:10].mean(axis=0)
        assert np.linalg.norm(norm.mu - centroid) < 1e-6

    def test_against_spreadsheet_recomputation(self, embedder):
        texts = [f"a{i % 4}x b{i % 3}x c{i % 5}x" for i in range(12)]
        series = window_series(feed(texts), 3, embedder=embedder)
        norm = fit_norm(series, baseline_fraction=0.5, sigma_mult=3.0)
        n_base = math.ceil(0.5 * len(series))
        base = series.embeddings[:n_base]
        mu = base.mean(axis=0)
        dists = np.sqrt(((base - mu) ** 2).sum(axis=1))
        expected = dists.mean() + 3.0 * dists.std()
        np.testing.assert_allclose(norm.mu, mu, atol=1e-12)
        assert norm.threshold == pytest.approx(expected, abs=1e-9)
        assert norm.baseline_count == n_base

    def test_insufficient_history(self, embedder):
        series = window_series(feed(["alpha"] * 2), 2, embedder=embedder)
        with pytest.raises(InsufficientHistory):
            fit_norm(series)  # one window -> baseline of one


class TestDetectAnomalies:
    def test_baseline_identical_series_no_outliers(self, embedder):
        series = window_series(feed(["alpha beta"] * 10), 2, embedder=embedder)
        norm = fit_norm(series)
        assert all(not outlier for (_, _, outlier) in detect_anomalies(series, norm))

    def test_orthogonal_window_flagged(self):
        # distance between orthonormal vectors is sqrt(2) > any threshold < sqrt(2)
        base = np.array([1.0] + [0.0] * 63)
        rogue = np.array([0.0, 1.0] + [0.0] * 62)
        vectors = np.stack([base] * 9 + [rogue])
        series = window_series(feed(["x"] * 10), 1, activity_embeddings=vectors)
        norm = fit_norm(series, baseline_fraction=0.5)
        assert norm.threshold < math.sqrt(2)
        flags = detect_anomalies(series, norm)
        assert [outlier for (_, _, outlier) in flags] == [False] * 9 + [True]
        assert flags[-1][1] == pytest.approx(math.sqrt(2), abs=1e-9)

    def test_dimension_mismatch(self, embedder):
        series = window_series(feed(["alpha"] * 6), 2, embedder=embedder)
        norm = fit_norm(series)
        small = window_series(feed(["alpha"] * 6), 2,
                              activity_embeddings=np.zeros((6, 8)))
        with pytest.raises(InvalidNorm):
            detect_anomalies(small, norm)


class TestSpliceHijack:
    def make_feeds(self, k=100):
        original = feed([f"mine{i}x" for i in range(k)])
        donor = feed([f"theirs{i}x" for i in range(k)], start=1_500_000_000)
        return original, donor

    def test_mask_count_and_contiguity(self):
        original, donor = self.make_feeds(100)
        spliced, mask = splice_hijack(original, donor, 0.3, rng_seed=1)
        assert sum(mask) == 30
        first, last = mask.index(True), 99 - mask[::-1].index(True)
        assert last - first + 1 == 30
        assert all(mask[first:last + 1])

    def test_near_full_splice_arithmetic(self):
        original, donor = self.make_feeds(10)
        # ceil(f_h * k) = 9 leaves start in {0, 1}
        spliced, mask = splice_hijack(original, donor, 0.9, rng_seed=0)
        assert sum(mask) == 9

    def test_determinism(self):
        original, donor = self.make_feeds(50)
        a = splice_hijack(original, donor, 0.2, rng_seed=42)
        b = splice_hijack(original, donor, 0.2, rng_seed=42)
        assert a[1] == b[1]
        assert [x.text for x in a[0]] == [x.text for x in b[0]]

    def test_timestamps_and_types_kept(self):
        original, donor = self.make_feeds(40)
        spliced, mask = splice_hijack(original, donor, 0.25, rng_seed=7)
        for i, replaced in enumerate(mask):
            assert spliced[i].time == original[i].time
            assert spliced[i].type == original[i].type
            if replaced:
                assert spliced[i].text.startswith("theirs")
            else:
                assert spliced[i].text == original[i].text

    def test_donor_too_short(self):
        original, _ = self.make_feeds(100)
        with pytest.raises(InsufficientDonor):
            splice_hijack(original, original[:10], 0.5, rng_seed=0)

    def test_bad_fraction(self):
        original, donor = self.make_feeds(10)
        with pytest.raises(InvalidInput):
            splice_hijack(original, donor, 1.5, rng_seed=0)

    def test_start_range_respected(self):
        original, donor = self.make_feeds(100)
        for seed in range(10):
            _, mask = splice_hijack(original, donor, 0.1, rng_seed=seed,
                                    start_range=(50, 100))
            assert mask.index(True) >= 50


class TestScoring:
    def test_perfect_flags(self):
        mask = [False] * 10 + [True] * 20 + [False] * 10
        truth = mask_to_window_truth(mask, 5)
        assert score_detection(truth, mask, 5) == (1.0, 1.0, 1.0)

    def test_zero_flags_zero_recall(self):
        mask = [False] * 10 + [True] * 20 + [False] * 10
        flags = [False] * (40 - 5 + 1)
        precision, recall, f1 = score_detection(flags, mask, 5)
        assert recall == 0.0
        assert f1 == 0.0

    def test_hand_computed_confusion_matrix(self):
        # w=3; mask gives window majorities: windows over positions
        # [0..2],[1..3],[2..4],[3..5],[4..6]; spliced = positions 2,3,4
        mask = [False, False, True, True, True, False, False]
        truth = mask_to_window_truth(mask, 3)
        assert truth == [False, True, True, True, False]
        flags = [True, True, True, False, False]
        # TP=2 (windows 1,2), FP=1 (window 0), FN=1 (window 3)
        precision, recall, f1 = score_detection(flags, mask, 3)
        assert precision == pytest.approx(2 / 3)
        assert recall == pytest.approx(2 / 3)
        assert f1 == pytest.approx(2 / 3)

    def test_majority_rule_is_strict(self):
        # exactly half spliced is not a majority
        assert mask_to_window_truth([True, False], 2) == [False]
        assert mask_to_window_truth([True, True, False, False], 4) == [False]

    def test_length_mismatch(self):
        with pytest.raises(InvalidInput):
            score_detection([True], [True] * 10, 3)


class TestDetectionQuality:
    """Small-scale version of the acceptance detection experiment."""

    def test_spliced_windows_separate_and_detect(self, embedder):
        cfg = CorpusConfig(users=6, activities_per_user=400, seed=13)
        feeds = generate_corpus(cfg)
        users = sorted(feeds)
        for f_h in (0.1, 0.2, 0.3):
            tp = fp = fn = 0
            for i, user in enumerate(users):
                donor = feeds[users[(i + 1) % len(users)]]
                k = len(feeds[user])
                spliced, mask = splice_hijack(
                    feeds[user], donor, f_h, rng_seed=300 + i, start_range=(240, k))
                series = window_series(spliced, 20, embedder=embedder)
                norm = fit_norm(series)
                detections = detect_anomalies(series, norm)
                flags = [o for (_, _, o) in detections]
                truth = mask_to_window_truth(mask, 20)
                dists = np.array([d for (_, d, _) in detections])
                truth_arr = np.array(truth)
                # monotone separation: spliced windows sit farther out
                assert dists[truth_arr].mean() > dists[~truth_arr].mean()
                tp += sum(1 for f, t in zip(flags, truth) if f and t)
                fp += sum(1 for f, t in zip(flags, truth) if f and not t)
                fn += sum(1 for f, t in zip(flags, truth) if not f and t)
            precision = tp / (tp + fp)
            recall = tp / (tp + fn)
            f1 = 2 * precision * recall / (precision + recall)
            assert f1 >= 0.85, f"f_h={f_h}: F1={f1:.3f}"
