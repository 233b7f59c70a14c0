import pytest

from tara.preprocess import (
    USER,
    collapse_offspring,
    extract_frames,
    frames_from_sentence,
    insert_imperative_subject,
    predicate_indices,
    reverse_user_patient,
    PredicateFrame,
    strip_articles,
    is_user_phrase,
)
from tara.sdp import ArgCategory, SdpDocument, SdpSentence, SdpToken


def sent(index, *tokens):
    built = tuple(
        SdpToken(index=i, surface=form, dependencies=tuple(deps))
        for i, (form, deps) in enumerate(tokens, start=1)
    )
    return SdpSentence(index=index, text=" ".join(t[0] for t in tokens), tokens=built)


def doc_of(*sentences):
    return SdpDocument(manual_id="test", sentences=tuple(sentences))


IMPERATIVE = sent(
    0,
    ("Sign in", [(0, "Root")]),
    ("the", [(3, "mDEPD")]),
    ("APP", [(1, "Pat")]),
)


class TestImperativeSubject:
    def test_user_inserted_for_bare_root(self):
        result = insert_imperative_subject(IMPERATIVE)
        assert result.tokens[0].surface == "User"
        assert result.tokens[0].synthetic
        assert result.tokens[0].dependencies == ((2, "Agt"),)
        # original tokens shifted by one
        assert [t.surface for t in result.tokens] == ["User", "Sign in", "the", "APP"]
        assert result.tokens[3].dependencies == ((2, "Pat"),)

    def test_sentence_with_agent_unchanged(self):
        with_agent = sent(
            0,
            ("the user", [(2, "Agt")]),
            ("signs in", [(0, "Root")]),
        )
        assert insert_imperative_subject(with_agent) is with_agent

    def test_two_bare_roots_each_get_the_subject(self):
        two_roots = sent(
            0,
            ("Open", [(0, "Root")]),
            ("restart", [(0, "Root")]),
        )
        result = insert_imperative_subject(two_roots)
        assert result.tokens[0].dependencies == ((2, "Agt"), (3, "Agt"))


class TestCollapse:
    def test_offspring_concatenate_in_token_order(self):
        parsed = sent(
            0,
            ("get", [(0, "Root")]),
            ("scratch", [(3, "mDEPD")]),
            ("card", [(1, "Pat")]),
        )
        collapsed = collapse_offspring(parsed)
        assert [t.surface for t in collapsed.tokens] == ["get", "scratch card"]
        assert collapsed.tokens[1].span == (2, 3)

    def test_leaf_children_unchanged(self):
        parsed = sent(
            0,
            ("pay", [(0, "Root")]),
            ("bill", [(1, "Pat")]),
        )
        assert collapse_offspring(parsed) is parsed

    def test_nested_predicate_survives(self):
        # "scratch the card to win the prize": "win" keeps its own frame
        parsed = sent(
            0,
            ("scratch", [(0, "Root")]),
            ("the", [(3, "mDEPD")]),
            ("card", [(1, "Pat")]),
            ("win", [(1, "LINK")]),
            ("the", [(6, "mDEPD")]),
            ("prize", [(4, "Pat")]),
        )
        collapsed = collapse_offspring(parsed)
        surfaces = [t.surface for t in collapsed.tokens]
        assert surfaces == ["scratch", "the card", "win", "the prize"]
        frames = frames_from_sentence(parsed, doc_of(parsed))
        assert [f.predicate for f in frames] == ["scratch", "win"]

    def test_idempotent(self):
        parsed = sent(
            0,
            ("get", [(0, "Root")]),
            ("a", [(4, "mDEPD")]),
            ("scratch", [(4, "mDEPD")]),
            ("card", [(1, "Pat")]),
            ("page", [(1, "Loc")]),
        )
        once = collapse_offspring(parsed)
        twice = collapse_offspring(once)
        assert once == twice

    def test_token_conservation(self, scratch_doc):
        # every original surface survives in exactly one phrase or predicate
        for sentence in scratch_doc.sentences:
            prepared = insert_imperative_subject(sentence)
            collapsed = collapse_offspring(prepared)
            spans = [i for t in collapsed.tokens for i in t.span]
            assert sorted(spans) == list(range(1, len(prepared.tokens) + 1))


class TestReversal:
    def test_user_patient_swapped(self):
        frame = PredicateFrame(
            predicate="send", span=(1,), sentence_index=0,
            agent="system", patient=USER,
        )
        result = reverse_user_patient(frame)
        assert result.agent is USER
        assert result.patient == "system"
        assert result.reversed

    def test_user_agent_untouched(self):
        frame = PredicateFrame(
            predicate="scratch", span=(1,), sentence_index=0,
            agent=USER, patient="card",
        )
        assert reverse_user_patient(frame) is frame

    def test_swap_with_empty_agent(self):
        frame = PredicateFrame(
            predicate="notify", span=(1,), sentence_index=0,
            agent=None, patient=USER,
        )
        result = reverse_user_patient(frame)
        assert result.agent is USER
        assert result.patient is None
        assert result.reversed

    def test_reversed_frame_never_re_reversed(self):
        frame = PredicateFrame(
            predicate="send", span=(1,), sentence_index=0,
            agent="system", patient=USER,
        )
        once = reverse_user_patient(frame)
        assert reverse_user_patient(once) is once


class TestFrameExtraction:
    def test_fixture_frames(self, scratch_doc):
        frames = extract_frames(scratch_doc)
        predicates = [f.predicate.casefold() for f in frames]
        assert predicates == [
            "sign in", "scan", "pay", "get", "scratch", "is", "have", "limit",
        ]
        # the user-performed steps all have the user as agent
        for frame in frames[:5]:
            assert frame.agent is USER

    def test_empty_document_yields_no_frames(self):
        assert extract_frames(doc_of()) == []

    def test_negation_slot_is_normalized(self):
        parsed = sent(
            0,
            ("didn't", [(2, "mNEG")]),
            ("get", [(0, "Root")]),
            ("card", [(2, "Pat")]),
        )
        frames = frames_from_sentence(parsed, doc_of(parsed))
        (frame,) = frames
        slot = frame.slots[0]
        assert slot.category is ArgCategory.MOD
        assert slot.value == "negation"
        assert slot.surface == "didn't"
        assert frame.has_negation()

    def test_frames_ordered_by_sentence_then_position(self, scratch_doc):
        frames = extract_frames(scratch_doc)
        keys = [(f.sentence_index, f.span[0]) for f in frames]
        assert keys == sorted(keys)


def test_strip_articles():
    assert strip_articles("the same user") == "same user"
    assert strip_articles("a scratch card") == "scratch card"
    assert strip_articles("the") == "the"  # never strips to nothing
    assert strip_articles("10 scratch cards", drop_numerals=True) == "scratch cards"


def test_is_user_phrase():
    assert is_user_phrase("the user")
    assert is_user_phrase("You")
    assert is_user_phrase("I")
    assert not is_user_phrase("the same user")
    assert not is_user_phrase("power user")


def test_predicate_indices_require_role_children_or_root():
    parsed = sent(
        0,
        ("rate", [(2, "Agt")]),
        ("is", [(0, "Root")]),
        ("100%", [(2, "Pat")]),
    )
    assert predicate_indices(parsed) == {2}
