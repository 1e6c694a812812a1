"""Preprocessing: cleanup, stop words, and the suffix-stemming rule table."""

from __future__ import annotations

from tapestry.analysis.text import STOP_WORDS, preprocess, stem


class TestPreprocess:
    def test_hand_traced_example(self):
        # "this"/"out" are stop words; the URL and the hashtag are dropped
        assert preprocess("Check THIS out!!! http://x.co #wow") == ["check"]

    def test_empty_text(self):
        assert preprocess("") == []

    def test_stemming_family(self):
        assert preprocess("running runs ran") == ["runn", "run", "ran"]

    def test_mentions_dropped(self):
        assert preprocess("hello @someone waves") == ["hello", "wave"]

    def test_hashtags_dropped_wholesale(self):
        assert preprocess("#topic matter") == ["matter"]

    def test_urls_dropped(self):
        assert preprocess("see https://example.com/a?b=c and www.example.org now") == ["see"]

    def test_emoji_and_punctuation_stripped(self):
        assert preprocess("nice \U0001f600 day!!!") == ["nice", "day"]

    def test_lowercased(self):
        assert preprocess("LOUD Words") == ["loud", "word"]

    def test_stop_words_removed(self):
        assert preprocess("the cat and the hat") == ["cat", "hat"]

    def test_numbers_survive(self):
        assert preprocess("route 66 runs") == ["route", "66", "run"]


class TestStemRules:
    """The rule table from docs/formats.md."""

    def test_ing_rule(self):
        assert stem("running") == "runn"
        assert stem("sing") == "sing"      # too short for the -ing rule

    def test_ed_rule(self):
        assert stem("walked") == "walk"
        assert stem("bed") == "bed"        # too short for the -ed rule

    def test_ly_rule(self):
        assert stem("quickly") == "quick"
        assert stem("fly") == "fly"        # too short for the -ly rule

    def test_s_rule(self):
        assert stem("cats") == "cat"
        assert stem("pass") == "pass"      # -ss never stripped
        assert stem("is") == "is"          # too short for the -s rule

    def test_first_matching_rule_wins(self):
        # -ing is checked before the plural rule
        assert stem("sings") == "sing"


def test_stop_list_is_frozen_and_contains_the_traced_words():
    assert "this" in STOP_WORDS
    assert "out" in STOP_WORDS
    assert isinstance(STOP_WORDS, frozenset)
