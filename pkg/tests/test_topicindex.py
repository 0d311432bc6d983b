"""Keyword extraction, index postings, discriminator scores, topic relevance."""

from __future__ import annotations

import math

import pytest

from persuade.argmodel import Argument, ArgumentGraph, FunctionalType, OntologicalKind, OntologicalType
from persuade.topicindex import (
    KeywordIndex,
    StopList,
    UnknownKeywordError,
    build_index,
    default_stoplist,
    discriminator_score,
    extract_keywords,
    topic_relevance,
)


class TestStopList:
    def test_bundled_size_band(self):
        assert 200 <= len(default_stoplist().words) <= 300

    def test_from_text_skips_comments(self):
        sl = StopList.from_text("# c\nthe\nA\n")
        assert sl.words == {"the", "a"}


class TestExtraction:
    def test_reference_sentence(self):
        out = extract_keywords("I do not have the right clothes to do sport", default_stoplist())
        assert out == ["right", "clothes", "sport"]

    def test_empty_input(self):
        assert extract_keywords("", default_stoplist()) == []

    def test_case_folding_and_stop_removal(self):
        assert extract_keywords("the The THE", default_stoplist()) == []

    def test_duplicates_keep_first_occurrence(self):
        sl = StopList(frozenset())
        assert extract_keywords("b a b c a", sl) == ["b", "a", "c"]

    def test_internal_hyphen_and_apostrophe_survive(self):
        sl = StopList(frozenset())
        assert extract_keywords("sign-up doesn't -edge- 'quote'", sl) == [
            "sign-up", "doesn't", "edge", "quote",
        ]

    def test_never_emits_stop_words_or_empty(self):
        sl = default_stoplist()
        out = extract_keywords("The quick brown fox, and the lazy dog!", sl)
        assert all(tok and tok not in sl.words for tok in out)


class TestIndex:
    def test_clothes_posting_is_b2a_only(self, sports):
        index = build_index(sports.graph)
        assert index.postings["clothes"] == {"b2a"}

    def test_curated_phrases_index_as_units(self, sports):
        index = build_index(sports.graph)
        assert "pg" in index.postings["sports activity"]
        assert index.postings["sign-up"] == {"pg", "b2a"}

    def test_extraction_fallback_when_no_curated_keywords(self, office_graph):
        index = build_index(office_graph)
        assert "walks" in index.postings  # from pg1's text
        assert index.total == len(office_graph.arguments)

    def test_empty_graph(self):
        index = build_index(ArgumentGraph("empty"))
        assert index.total == 0 and not index.postings

    def test_postings_invert_exactly(self, sports):
        index = build_index(sports.graph)
        for kw, ids in index.postings.items():
            for arg_id in ids:
                assert kw in sports.graph.arguments[arg_id].keywords


class TestDiscriminator:
    def test_df_equal_total_scores_zero(self):
        index = KeywordIndex({"k": frozenset("abcdefghij")}, total=10)
        assert discriminator_score(index, "k") == pytest.approx(0.0, abs=1e-12)

    def test_df_one_of_ten_is_ln_ten(self):
        index = KeywordIndex({"k": frozenset({"a"})}, total=10)
        assert discriminator_score(index, "k") == pytest.approx(math.log(10), abs=1e-9)

    def test_unknown_keyword(self):
        with pytest.raises(UnknownKeywordError):
            discriminator_score(KeywordIndex({}, total=0), "ghost")

    def test_antitone_in_document_frequency(self, sports):
        index = build_index(sports.graph)
        clothes = discriminator_score(index, "clothes")
        for kw, ids in index.postings.items():
            if len(ids) >= 2:
                assert clothes > discriminator_score(index, kw)


def _arg(topics):
    return Argument(
        "a", "t",
        frozenset({OntologicalType(OntologicalKind.BACKGROUND)}),
        FunctionalType.OPINION,
        topics=frozenset(topics),
    )


class TestTopicRelevance:
    def test_half_overlap(self, sports):
        a3 = sports.graph.arguments["a3"]
        assert topic_relevance(a3, {"SportsClubsIntimidating"}) == pytest.approx(0.5)

    def test_full_overlap(self):
        assert topic_relevance(_arg({"X", "Y"}), {"X", "Y"}) == 1.0

    def test_no_topics(self):
        assert topic_relevance(_arg(()), {"X"}) == 0.0

    def test_no_interests(self):
        assert topic_relevance(_arg({"X"}), frozenset()) == 0.0

    def test_monotone_in_interests(self):
        a = _arg({"X", "Y", "Z"})
        assert (
            topic_relevance(a, set())
            <= topic_relevance(a, {"X"})
            <= topic_relevance(a, {"X", "Y"})
            <= topic_relevance(a, {"X", "Y", "Q"})
        )
