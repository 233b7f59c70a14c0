"""Classical matching baselines: lexical similarity and keyword scoring.

The lexical baseline scores every manual sentence against the question
with the same character-level similarity the matcher uses and returns the
two best sentences.  The keyword baseline combines keyword-overlap counts
with a parse-subtree test and a distance penalty:

    16*|K_Q| + 16*|K_A| + 16*|K_Q n K_A| + 16*|subtree overlap| - 4*sqrt(D_max)

where K_Q counts candidate-answer keywords found in the question, K_A
question keywords found in the candidate, D_max the token distance between
the two farthest question keywords in the candidate (0 when fewer than two
occur; distances are measured in tokens).  Manual keywords come from
TF-IDF over the corpus; question keywords are the question tokens that are
manual keywords plus the node labels of the question graph, which keeps
the formula's inputs without an external keyword service.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

from .graph import TaraGraph
from .matching import node_similarity
from .sdp import SdpDocument, SdpSentence

_TOKEN_RE = re.compile(r"[\w%']+")

#: Keyword list size extracted per manual.
KEYWORDS_PER_MANUAL = 10


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.casefold())


def lexical_match(
    question: str, sentences: Sequence[str]
) -> list[tuple[int, float]]:
    """Top-2 sentences by similarity to the question, ties by earlier index."""
    scored = [
        (index, node_similarity(question, sentence))
        for index, sentence in enumerate(sentences)
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:2]


def tfidf_keywords(
    corpus: Sequence[str], manual: str, limit: int = KEYWORDS_PER_MANUAL
) -> list[str]:
    """Top TF-IDF terms of one manual against a corpus of manual texts.

    Score is raw term frequency times log(N/df); ties break
    lexicographically.  Zero-scored terms (present in every document) only
    fill in when fewer than ``limit`` positive candidates exist.
    """
    if not corpus:
        raise ValueError("corpus must contain at least one manual")
    doc_tokens = [set(tokenize(text)) for text in corpus]
    counts: dict[str, int] = {}
    for token in tokenize(manual):
        counts[token] = counts.get(token, 0) + 1

    n_docs = len(corpus)
    scored = []
    for term, tf in counts.items():
        df = sum(1 for tokens in doc_tokens if term in tokens)
        df = max(df, 1)
        scored.append((term, tf * math.log(n_docs / df), tf))

    positive = sorted(
        (entry for entry in scored if entry[1] > 0),
        key=lambda entry: (-entry[1], entry[0]),
    )
    keywords = [term for term, _, _ in positive[:limit]]
    if len(keywords) < limit:
        zero = sorted(
            (entry for entry in scored if entry[1] <= 0),
            key=lambda entry: (-entry[2], entry[0]),
        )
        keywords.extend(term for term, _, _ in zero[: limit - len(keywords)])
    return keywords


@dataclass(frozen=True)
class KeywordContext:
    """Inputs the keyword formula needs for one (manual, question) pair."""

    manual_keywords: tuple[str, ...]
    question_keywords: tuple[str, ...]
    parse: SdpDocument | None = None

    def __post_init__(self) -> None:
        if len(self.manual_keywords) > KEYWORDS_PER_MANUAL:
            raise ValueError(
                f"manual_keywords limited to {KEYWORDS_PER_MANUAL} entries"
            )

    @classmethod
    def build(
        cls,
        corpus: Sequence[str],
        manual: str,
        question: str,
        question_graph: TaraGraph | None = None,
        parse: SdpDocument | None = None,
    ) -> "KeywordContext":
        manual_keywords = tuple(tfidf_keywords(corpus, manual))
        question_keywords: list[str] = []
        for token in tokenize(question):
            if token in manual_keywords and token not in question_keywords:
                question_keywords.append(token)
        if question_graph is not None:
            for node in question_graph.nodes.values():
                if node.is_user:
                    continue
                for token in tokenize(node.label):
                    if token not in question_keywords:
                        question_keywords.append(token)
        return cls(
            manual_keywords=manual_keywords,
            question_keywords=tuple(question_keywords),
            parse=parse,
        )


def keyword_score_from_counts(
    in_question: int,
    in_candidate: int,
    shared: int,
    subtree_overlap: int,
    max_distance: float,
) -> float:
    """The scoring formula on precomputed counts; may be negative."""
    return (
        16 * in_question
        + 16 * in_candidate
        + 16 * shared
        + 16 * subtree_overlap
        - 4 * math.sqrt(max_distance)
    )


def keyword_score(
    question: str,
    candidate: str,
    ctx: KeywordContext,
    sentence_index: int | None = None,
) -> float:
    """Score one candidate sentence against the question."""
    question_tokens = set(tokenize(question))
    candidate_tokens = tokenize(candidate)
    candidate_set = set(candidate_tokens)

    answer_keywords = {k for k in ctx.manual_keywords if k in candidate_set}
    in_question = len(answer_keywords & question_tokens)
    question_keywords = set(ctx.question_keywords)
    in_candidate = len(question_keywords & candidate_set)
    shared = len(question_keywords & answer_keywords)

    subtree = 0
    if ctx.parse is not None and sentence_index is not None:
        for sentence in ctx.parse.sentences:
            if sentence.index == sentence_index:
                subtree = _subtree_overlap(sentence, question_keywords)
                break

    positions = [
        i for i, token in enumerate(candidate_tokens) if token in question_keywords
    ]
    max_distance = (positions[-1] - positions[0]) if len(positions) > 1 else 0
    return keyword_score_from_counts(
        in_question, in_candidate, shared, subtree, max_distance
    )


def rank_by_keywords(
    question: str,
    sentences: Sequence[str],
    ctx: KeywordContext,
) -> list[tuple[int, float]]:
    """All sentences ranked by keyword score, ties by earlier index."""
    scored = [
        (index, keyword_score(question, sentence, ctx, sentence_index=index))
        for index, sentence in enumerate(sentences)
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def _subtree_overlap(sentence: SdpSentence, keywords: set[str]) -> int:
    """Question keywords sharing a parse subtree with another keyword.

    Two tokens share a subtree when one is an ancestor of the other or
    they have a common ancestor that is not a sentence root.
    """
    occurrences = [
        token.index
        for token in sentence.tokens
        if token.surface.casefold() in keywords
    ]
    if len(occurrences) < 2:
        return 0

    roots = {token.index for token in sentence.roots()}

    def ancestors(index: int) -> set[int]:
        seen: set[int] = set()
        frontier = [index]
        while frontier:
            current = frontier.pop()
            for head in sentence.token(current).heads():
                if head != 0 and head not in seen:
                    seen.add(head)
                    frontier.append(head)
        return seen

    ancestry = {index: ancestors(index) for index in occurrences}
    overlapping = set()
    for i, a in enumerate(occurrences):
        for b in occurrences[i + 1:]:
            shares = (
                a in ancestry[b]
                or b in ancestry[a]
                or (ancestry[a] & ancestry[b]) - roots
            )
            if shares:
                overlapping.update((a, b))
    keyword_hits = {sentence.token(i).surface.casefold() for i in overlapping}
    return len(keyword_hits)
