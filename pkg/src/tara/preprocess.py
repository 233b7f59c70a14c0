"""Normalization of parsed sentences into predicate frames.

Three rewrites run per sentence, in order:

1. imperative-subject insertion: a root predicate with no agent dependent
   gets a synthetic user token attached via Agt;
2. vertex elimination: the offspring of a predicate's child are removed
   and concatenated (original token order) into the child's phrase, so
   frames carry meaningful phrases instead of single words;
3. user-patient reversal: frames whose patient is the user swap agent and
   patient and are flagged ``reversed``.

A predicate is any root token or any token with an Agt or Pat dependent;
predicates are never eliminated, so nested clauses survive as their own
frames.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from .sdp import ArgCategory, NEGATION_TAG, SdpDocument, SdpSentence, SdpToken

logger = logging.getLogger(__name__)

#: Leading function words dropped when normalizing phrases.
ARTICLES = frozenset(
    {
        "the",
        "a",
        "an",
        "my",
        "your",
        "our",
        "his",
        "her",
        "their",
        "its",
        "this",
        "that",
        "these",
        "those",
    }
)

#: Surfaces that denote the manual's user once articles are stripped.
USER_PHRASES = frozenset({"user", "users", "you", "i", "we", "me", "us"})

#: Normalized value given to negation modifier slots.
NEGATION_VALUE = "negation"

#: Surface of the synthetic imperative subject.
USER_SURFACE = "User"


class UserSubject:
    """Sentinel marking the user in frame roles."""

    _instance: "UserSubject | None" = None

    def __new__(cls) -> "UserSubject":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return "USER"


USER = UserSubject()


def strip_articles(phrase: str, drop_numerals: bool = False) -> str:
    """Drop leading articles (and optionally leading numerals) from a phrase.

    Never strips a phrase down to nothing: the last remaining token wins.
    """
    tokens = phrase.split()
    while len(tokens) > 1:
        head = tokens[0].casefold()
        if head in ARTICLES or (drop_numerals and head.isdigit()):
            tokens = tokens[1:]
        else:
            break
    return " ".join(tokens) if tokens else phrase


def is_user_phrase(phrase: str) -> bool:
    return strip_articles(phrase).casefold() in USER_PHRASES


@dataclass(frozen=True)
class ArgSlot:
    """One argument slot extracted from a frame's dependency tags.

    ``value`` equals the surface except for negation modifiers, which are
    normalized to the literal ``"negation"`` so inference can test for
    negation without lexical knowledge.
    """

    category: ArgCategory
    surface: str
    source_tag: str
    value: str

    @classmethod
    def from_tag(cls, category: ArgCategory, surface: str, tag: str) -> "ArgSlot":
        value = NEGATION_VALUE if tag == NEGATION_TAG else surface
        return cls(category=category, surface=surface, source_tag=tag, value=value)


@dataclass(frozen=True)
class PredicateFrame:
    """A normalized predicate with its roles and argument slots.

    ``predicate_heads`` lists the span leads of other predicates in the
    same sentence that this predicate depends on; the builder uses them to
    override linear step order.
    """

    predicate: str
    span: tuple[int, ...]
    sentence_index: int
    agent: UserSubject | str | None = None
    patient: UserSubject | str | None = None
    extra_patients: tuple[str, ...] = ()
    slots: tuple[ArgSlot, ...] = ()
    reversed: bool = False
    predicate_heads: tuple[int, ...] = ()

    def has_negation(self) -> bool:
        return any(
            slot.category is ArgCategory.MOD and slot.value == NEGATION_VALUE
            for slot in self.slots
        )


def predicate_indices(sentence: SdpSentence) -> frozenset[int]:
    """Indices of root tokens and of tokens with an Agt or Pat dependent."""
    predicates = {token.index for token in sentence.roots()}
    for token in sentence.tokens:
        for head, tag in token.dependencies:
            if head != 0 and tag in ("Agt", "Pat"):
                predicates.add(head)
    return frozenset(predicates)


def insert_imperative_subject(
    sentence: SdpSentence, surface: str = USER_SURFACE
) -> SdpSentence:
    """Attach a synthetic user subject to every root predicate lacking one.

    The token is inserted at position 1 (mirroring "User sign in the APP")
    and carries one Agt dependency per subject-less root.  Sentences whose
    roots all have agents are returned unchanged.
    """
    bare_roots = [
        root.index
        for root in sentence.roots()
        if not any(
            (root.index, "Agt") in token.dependencies for token in sentence.tokens
        )
    ]
    if not bare_roots:
        return sentence

    user = SdpToken(
        index=1,
        surface=surface,
        dependencies=tuple((root + 1, "Agt") for root in bare_roots),
        synthetic=True,
    )
    shifted = [
        replace(
            token,
            index=token.index + 1,
            dependencies=tuple(
                (head + 1 if head else 0, tag) for head, tag in token.dependencies
            ),
            span=tuple(i + 1 for i in token.span),
        )
        for token in sentence.tokens
    ]
    return replace(sentence, tokens=tuple([user, *shifted]))


def collapse_offspring(sentence: SdpSentence, joiner: str = " ") -> SdpSentence:
    """Merge each predicate child's offspring into the child's phrase.

    Predicates and direct children of predicates are never absorbed;
    everything below them is concatenated in original token order.  The
    operation is idempotent.
    """
    predicates = predicate_indices(sentence)
    protected = set(predicates)
    dependents: dict[int, list[SdpToken]] = {}
    for token in sentence.tokens:
        for head, _ in token.dependencies:
            if head:
                dependents.setdefault(head, []).append(token)
        if any(head in predicates for head, _ in token.dependencies):
            protected.add(token.index)

    absorbed_by: dict[int, int] = {}

    def absorb(carrier: int, index: int) -> None:
        for child in dependents.get(index, ()):
            if child.index in protected or child.index in absorbed_by:
                continue
            absorbed_by[child.index] = carrier
            absorb(carrier, child.index)

    for predicate in sorted(predicates):
        for child in dependents.get(predicate, ()):
            if child.index in predicates or child.index in absorbed_by:
                continue
            absorb(child.index, child.index)

    if not absorbed_by:
        return sentence

    kept = [t for t in sentence.tokens if t.index not in absorbed_by]
    new_index = {token.index: position for position, token in enumerate(kept, start=1)}

    def carrier_index(old: int) -> int:
        return new_index[absorbed_by.get(old, old)]

    phrases: dict[int, list[SdpToken]] = {token.index: [token] for token in kept}
    for token in sentence.tokens:
        if token.index in absorbed_by:
            phrases[absorbed_by[token.index]].append(token)

    rebuilt = []
    for token in kept:
        parts = sorted(phrases[token.index], key=lambda t: t.span[0])
        surface = joiner.join(part.surface for part in parts)
        span = tuple(sorted(i for part in parts for i in part.span))
        deps = tuple(
            (carrier_index(head) if head else 0, tag)
            for head, tag in token.dependencies
        )
        rebuilt.append(
            replace(token, index=new_index[token.index], surface=surface,
                    span=span, dependencies=deps)
        )
    return replace(sentence, tokens=tuple(rebuilt))


def reverse_user_patient(frame: PredicateFrame) -> PredicateFrame:
    """Swap agent and patient when the user sits in the patient role.

    Reversed frames are flagged and never re-reversed.
    """
    if frame.reversed or frame.patient is not USER:
        return frame
    return replace(frame, agent=USER, patient=frame.agent, reversed=True)


def frames_from_sentence(
    sentence: SdpSentence, doc: SdpDocument
) -> list[PredicateFrame]:
    prepared = collapse_offspring(
        insert_imperative_subject(sentence), joiner=doc.joiner
    )
    predicates = sorted(predicate_indices(prepared))
    frames = []
    for index in predicates:
        predicate = prepared.token(index)
        agent: UserSubject | str | None = None
        patient: UserSubject | str | None = None
        extra_patients: list[str] = []
        slots: list[ArgSlot] = []
        for token in prepared.tokens:
            for head, tag in token.dependencies:
                if head != index:
                    continue
                if tag == "Agt":
                    role = _role_value(token)
                    if agent is None:
                        agent = role
                    else:
                        logger.debug(
                            "sentence %d: extra agent %r on %r ignored",
                            sentence.index,
                            token.surface,
                            predicate.surface,
                        )
                elif tag == "Pat":
                    role = _role_value(token)
                    if patient is None:
                        patient = role
                    elif isinstance(role, str):
                        extra_patients.append(role)
                else:
                    category = doc.arg_category(tag)
                    if category is not None:
                        slots.append(ArgSlot.from_tag(category, token.surface, tag))
        predicate_heads = tuple(
            prepared.token(head).span[0]
            for head in predicate.heads()
            if head != 0 and head in predicates
        )
        frame = PredicateFrame(
            predicate=predicate.surface,
            span=predicate.span,
            sentence_index=sentence.index,
            agent=agent,
            patient=patient,
            extra_patients=tuple(extra_patients),
            slots=tuple(slots),
            predicate_heads=predicate_heads,
        )
        frame = reverse_user_patient(frame)
        if frame.agent is None:
            logger.warning(
                "frame %r in sentence %d has no agent",
                frame.predicate,
                sentence.index,
            )
        frames.append(frame)
    return frames


def _role_value(token: SdpToken) -> UserSubject | str:
    if token.synthetic or is_user_phrase(token.surface):
        return USER
    return token.surface


def extract_frames(doc: SdpDocument) -> list[PredicateFrame]:
    """All frames of a document, ordered by (sentence, predicate position)."""
    frames: list[PredicateFrame] = []
    for sentence in doc.sentences:
        frames.extend(frames_from_sentence(sentence, doc))
    return frames
