import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tara.baselines import (
    KeywordContext,
    keyword_score,
    keyword_score_from_counts,
    lexical_match,
    rank_by_keywords,
    tfidf_keywords,
    tokenize,
)
from tara.sdp import SdpDocument, SdpSentence, SdpToken


class TestLexicalMatch:
    def test_identical_sentence_ranks_first_with_full_score(self):
        sentences = ["Open the app.", "Scan the code.", "Pay the bill."]
        ranked = lexical_match("Scan the code.", sentences)
        assert ranked[0] == (1, 1.0)
        assert len(ranked) == 2

    def test_ties_break_by_earlier_index(self):
        ranked = lexical_match("scan", ["pay", "pay", "scan"])
        assert ranked[0][0] == 2
        assert ranked[1][0] == 0  # the two "pay" rows tie; earlier wins

    def test_single_sentence_returns_one(self):
        assert len(lexical_match("anything", ["only sentence"])) == 1

    def test_fixture_question_finds_hit_rate_sentence(self, scratch_doc):
        sentences = [s.text for s in scratch_doc.sentences]
        ranked = lexical_match("What is the hit rate of the scratch card?", sentences)
        assert 5 in [index for index, _ in ranked]


class TestKeywordFormula:
    def test_documented_positive_case(self):
        # 16*2 + 16*1 + 16*1 + 16*1 - 4*sqrt(4) = 72
        assert keyword_score_from_counts(2, 1, 1, 1, 4) == 72.0

    def test_all_zero(self):
        assert keyword_score_from_counts(0, 0, 0, 0, 0) == 0.0

    def test_distance_only_goes_negative(self):
        assert keyword_score_from_counts(0, 0, 0, 0, 9) == -12.0

    @given(
        st.integers(0, 10), st.integers(0, 10), st.integers(0, 10),
        st.integers(0, 10), st.integers(0, 400),
    )
    def test_monotone_in_each_count(self, a, b, c, d, dist):
        base = keyword_score_from_counts(a, b, c, d, dist)
        assert keyword_score_from_counts(a + 1, b, c, d, dist) > base
        assert keyword_score_from_counts(a, b + 1, c, d, dist) > base
        assert keyword_score_from_counts(a, b, c + 1, d, dist) > base
        assert keyword_score_from_counts(a, b, c, d + 1, dist) > base
        assert keyword_score_from_counts(a, b, c, d, dist + 1) < base

    def test_max_distance_measured_in_tokens(self):
        ctx = KeywordContext(
            manual_keywords=("points", "expire"),
            question_keywords=("points", "expire"),
        )
        score = keyword_score(
            "when do the points expire", "the points will expire in 30 days", ctx
        )
        # both keywords present in question and candidate, two token gap
        assert score == pytest.approx(16 * 2 + 16 * 2 + 16 * 2 - 4 * math.sqrt(2))

    def test_fewer_than_two_keyword_hits_means_zero_distance(self):
        ctx = KeywordContext(
            manual_keywords=("points",), question_keywords=("points",)
        )
        score = keyword_score("points", "the points", ctx)
        assert score == pytest.approx(16 * 3)


class TestSubtreeOverlap:
    def parse(self):
        sentence = SdpSentence(
            index=0,
            text="Claim the coupon before Sunday.",
            tokens=(
                SdpToken(1, "Claim", ((0, "Root"),)),
                SdpToken(2, "coupon", ((1, "Pat"),)),
                SdpToken(3, "before", ((4, "mDEPD"),)),
                SdpToken(4, "Sunday", ((1, "Tfin"),)),
            ),
        )
        return SdpDocument(manual_id="m", sentences=(sentence,))

    def test_direct_ancestry_shares_subtree(self):
        ctx = KeywordContext(
            manual_keywords=("before", "sunday"),
            question_keywords=("before", "sunday"),
            parse=self.parse(),
        )
        score = keyword_score(
            "before sunday", "Claim the coupon before Sunday.", ctx, sentence_index=0
        )
        no_parse = keyword_score(
            "before sunday", "Claim the coupon before Sunday.",
            KeywordContext(
                manual_keywords=("before", "sunday"),
                question_keywords=("before", "sunday"),
            ),
        )
        assert score - no_parse == 16 * 2  # both keywords share a subtree

    def test_root_is_not_a_shared_subtree(self):
        ctx = KeywordContext(
            manual_keywords=("coupon", "sunday"),
            question_keywords=("coupon", "sunday"),
            parse=self.parse(),
        )
        with_parse = keyword_score(
            "coupon sunday", "Claim the coupon before Sunday.", ctx, sentence_index=0
        )
        without = keyword_score(
            "coupon sunday", "Claim the coupon before Sunday.",
            KeywordContext(
                manual_keywords=("coupon", "sunday"),
                question_keywords=("coupon", "sunday"),
            ),
        )
        assert with_parse == without  # only the root joins them


class TestTfidf:
    def test_three_document_hand_computation(self):
        corpus = [
            "scratch the card card card",
            "scan the code",
            "pay the bill pay",
        ]
        keywords = tfidf_keywords(corpus, corpus[0])
        # card: 3*ln3, scratch: 1*ln3, the: idf 0 fills last
        assert keywords == ["card", "scratch", "the"]

    def test_single_document_ranks_by_frequency(self):
        keywords = tfidf_keywords(["pay pay card the the the"],
                                  "pay pay card the the the")
        assert keywords == ["the", "pay", "card"]

    def test_ubiquitous_term_excluded_when_enough_candidates(self):
        corpus = [
            "alpha beta gamma delta epsilon zeta eta theta iota kappa shared "
            "lambda",
            "shared other words entirely here now one two three four five",
        ]
        keywords = tfidf_keywords(corpus, corpus[0])
        assert len(keywords) == 10
        assert "shared" not in keywords

    def test_limit_is_ten(self, corpus):
        texts = corpus.manual_texts()
        assert len(tfidf_keywords(texts, texts[0])) <= 10

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            tfidf_keywords([], "text")


class TestKeywordSystemPieces:
    def test_context_build_includes_graph_labels(self, corpus, question_docs):
        from tara.builder import build_question_graph

        question = "Where can I scratch my scratch card?"
        graph = build_question_graph(question_docs[question])
        ctx = KeywordContext.build(
            corpus.manual_texts(),
            corpus.manuals["scratch_card"].text,
            question,
            question_graph=graph,
        )
        assert "scratch" in ctx.question_keywords
        assert "card" in ctx.question_keywords

    def test_context_caps_manual_keywords(self):
        with pytest.raises(ValueError):
            KeywordContext(
                manual_keywords=tuple(f"k{i}" for i in range(11)),
                question_keywords=(),
            )

    def test_ranking_is_deterministic(self, corpus):
        manual = corpus.manuals["scratch_card"]
        ctx = KeywordContext.build(
            corpus.manual_texts(), manual.text,
            "Where can I scratch my scratch card?", parse=manual.doc,
        )
        first = rank_by_keywords(
            "Where can I scratch my scratch card?", manual.sentences, ctx
        )
        second = rank_by_keywords(
            "Where can I scratch my scratch card?", manual.sentences, ctx
        )
        assert first == second


def test_tokenize_keeps_percent_and_apostrophes():
    assert tokenize("The hit rate is 100%.") == ["the", "hit", "rate", "is", "100%"]
    assert tokenize("I didn't pay") == ["i", "didn't", "pay"]
