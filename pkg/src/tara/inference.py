"""Unified conflict classification and answer resolution over a matching.

Once a question graph is matched to a manual subgraph, the answer is read
off the conflict between the two:

* a negated question action (MOD valued "negation") surfaces the nearest
  preceding step plus the constraint facts of the entities around the
  matched subgraph;
* a question argument category absent on the matched manual action is
  filled by walking NEXT predecessors until an action carries it;
* differing argument values are answered with the manual-side values.

Negation is checked first (a negated question is inconsistent regardless
of other argument noise), then existence, then values.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .builder import StateVerbLexicon, build_question_graph
from .graph import (
    Argument,
    EdgeKind,
    NodeKind,
    TaraGraph,
    owner_chain_root,
)
from .matching import DEFAULT_THRESHOLD, Matching, match_subgraph, node_similarity
from .preprocess import NEGATION_VALUE
from .sdp import ArgCategory, SdpDocument

logger = logging.getLogger(__name__)

#: Auxiliary modifier values ignored by conflict detection: they appear in
#: nearly every polite question and carry no content to compare.
AUX_MODIFIERS = frozenset(
    {
        "can",
        "could",
        "will",
        "would",
        "may",
        "might",
        "shall",
        "should",
        "must",
        "do",
        "does",
        "did",
        "to",
        "please",
    }
)

#: Category scan order for missing-argument detection, most content first.
_MISSING_ORDER = (ArgCategory.LOC, ArgCategory.TIME, ArgCategory.MANN, ArgCategory.MOD)

_ACTION_CATS = (ArgCategory.MOD, ArgCategory.TIME, ArgCategory.LOC, ArgCategory.MANN)
_ENTITY_CATS = (ArgCategory.FN, ArgCategory.ATT, ArgCategory.STATE)

_CHILD_CATS = {
    ArgCategory.ATT: _ENTITY_CATS,
    ArgCategory.STATE: _ACTION_CATS,
}


class ConflictKind(enum.Enum):
    VALUE_CONFLICT = "ValueConflict"
    MISSING_ACTION_ARG = "MissingActionArg"
    NEGATION_MOD = "NegationMod"


class AnswerStatus(enum.Enum):
    ANSWERED = "Answered"
    NO_MATCH = "NoMatch"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class Conflict:
    kind: ConflictKind
    site: tuple[str, str | None]
    category: ArgCategory | None = None
    #: matched manual Action the resolution rules walk from
    manual_anchor: str | None = None
    #: every differing (question arg, manual arg) pair, for value conflicts
    value_sites: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class PayloadItem:
    phrase: str
    provenance: tuple[int, ...]


@dataclass(frozen=True)
class Answer:
    question_id: str
    status: AnswerStatus
    payload: tuple[PayloadItem, ...] = ()
    conflict: Conflict | None = None
    matched_graph_id: str | None = None
    diagnostic: str | None = None

    def ranked_sentences(self) -> list[int]:
        """Answer sentences in payload order, deduplicated."""
        seen: list[int] = []
        for item in self.payload:
            for index in item.provenance:
                if index not in seen:
                    seen.append(index)
        return seen


def _content_args(graph: TaraGraph, owner: str, category: ArgCategory) -> list[Argument]:
    return [
        a
        for a in graph.argument_values(owner, category)
        if a.value not in AUX_MODIFIERS
    ]


def classify_conflict(
    matching: Matching, q: TaraGraph, m: TaraGraph
) -> Conflict | None:
    """Classify the question/subgraph conflict; None means no conflict."""
    action_pairs = [
        p for p in matching.pairs
        if q.nodes[p.question_node].kind is NodeKind.ACTION
    ]

    for pair in action_pairs:
        for argument in q.argument_values(pair.question_node, ArgCategory.MOD):
            if argument.value == NEGATION_VALUE:
                return Conflict(
                    kind=ConflictKind.NEGATION_MOD,
                    site=(pair.question_node, pair.manual_node),
                    category=ArgCategory.MOD,
                    manual_anchor=pair.manual_node,
                )

    for pair in action_pairs:
        for category in _MISSING_ORDER:
            present = _content_args(q, pair.question_node, category)
            if present and not m.argument_values(pair.manual_node, category):
                return Conflict(
                    kind=ConflictKind.MISSING_ACTION_ARG,
                    site=(present[0].id, None),
                    category=category,
                    manual_anchor=pair.manual_node,
                )

    differences: list[tuple[ArgCategory, str, str]] = []
    for pair in matching.pairs:
        kind = q.nodes[pair.question_node].kind
        categories = _ACTION_CATS if kind is NodeKind.ACTION else _ENTITY_CATS
        _collect_differences(
            q, m, pair.question_node, pair.manual_node, categories, differences
        )
    if differences:
        category, q_arg, m_arg = differences[0]
        return Conflict(
            kind=ConflictKind.VALUE_CONFLICT,
            site=(q_arg, m_arg),
            category=category,
            value_sites=tuple((qa, ma) for _, qa, ma in differences),
        )
    return None


def _collect_differences(
    q: TaraGraph,
    m: TaraGraph,
    q_owner: str,
    m_owner: str,
    categories: Sequence[ArgCategory],
    out: list[tuple[ArgCategory, str, str]],
) -> None:
    for category in categories:
        q_args = _content_args(q, q_owner, category)
        m_args = m.argument_values(m_owner, category)
        if not q_args or not m_args:
            continue
        for q_arg in q_args:
            best = max(
                m_args,
                key=lambda m_arg: (node_similarity(q_arg.value, m_arg.value), m_arg.id),
            )
            if node_similarity(q_arg.value, best.value) < 1.0:
                out.append((category, q_arg.id, best.id))
            else:
                children = _CHILD_CATS.get(category)
                if children:
                    _collect_differences(q, m, q_arg.id, best.id, children, out)


# -- resolution ------------------------------------------------------------


def _predecessors_by_distance(m: TaraGraph, start: str) -> Iterable[list[str]]:
    seen = {start}
    frontier = [start]
    while frontier:
        previous = sorted(
            {p for node in frontier for p in m.next_in(node) if p not in seen}
        )
        if not previous:
            return
        seen.update(previous)
        frontier = previous
        yield previous


def _later_in_document(m: TaraGraph, node_ids: Sequence[str]) -> str:
    return max(
        node_ids,
        key=lambda n: (min(m.nodes[n].provenance, default=-1), n),
    )


def _node_item(m: TaraGraph, node_id: str) -> PayloadItem:
    node = m.nodes[node_id]
    provenance = set(node.provenance)
    for argument in m.arguments_of(node_id):
        provenance.update(argument.provenance)
    return PayloadItem(phrase=node.label, provenance=tuple(sorted(provenance)))


def _entity_neighbors(m: TaraGraph, node_id: str) -> set[str]:
    neighbors: set[str] = set()
    for edge in m.edges:
        if edge.kind is EdgeKind.PAT and edge.src == node_id:
            neighbors.add(edge.dst)
        elif edge.kind is EdgeKind.SUB:
            if edge.src == node_id:
                neighbors.add(edge.dst)
            elif edge.dst == node_id:
                neighbors.add(edge.src)
        elif edge.kind is EdgeKind.PATA:
            root = owner_chain_root(m, m.arguments[edge.src])
            if root is not None and root.id == node_id:
                neighbors.add(edge.dst)
            elif edge.dst == node_id and root is not None:
                neighbors.add(root.id)
    return neighbors


def _argument_subtree(m: TaraGraph, owner: str) -> Iterable[Argument]:
    for argument in m.arguments_of(owner):
        yield argument
        yield from _argument_subtree(m, argument.id)


def _constraint_states(m: TaraGraph, entity_id: str) -> list[Argument]:
    states = [
        a for a in _argument_subtree(m, entity_id)
        if a.category is ArgCategory.STATE
    ]
    for edge in m.edges:
        if edge.kind is EdgeKind.PATA and edge.dst == entity_id:
            states.append(m.arguments[edge.src])
    unique = {a.id: a for a in states}
    return [unique[key] for key in sorted(unique)]


def resolve(
    conflict: Conflict, matching: Matching, q: TaraGraph, m: TaraGraph,
    question_id: str = "question",
) -> Answer:
    """Produce the answer payload for a classified conflict."""
    if conflict.kind is ConflictKind.VALUE_CONFLICT:
        items = []
        for _, m_arg_id in conflict.value_sites:
            argument = m.arguments[m_arg_id]
            item = PayloadItem(argument.value, argument.provenance)
            if item not in items:
                items.append(item)
        return Answer(
            question_id=question_id,
            status=AnswerStatus.ANSWERED,
            payload=tuple(items),
            conflict=conflict,
            matched_graph_id=m.graph_id,
        )

    if conflict.kind is ConflictKind.MISSING_ACTION_ARG:
        assert conflict.manual_anchor is not None and conflict.category is not None
        for level in _predecessors_by_distance(m, conflict.manual_anchor):
            carriers = [
                n for n in level if m.argument_values(n, conflict.category)
            ]
            if carriers:
                chosen = _later_in_document(m, carriers)
                items = tuple(
                    PayloadItem(a.value, a.provenance)
                    for a in m.argument_values(chosen, conflict.category)
                )
                return Answer(
                    question_id=question_id,
                    status=AnswerStatus.ANSWERED,
                    payload=items,
                    conflict=conflict,
                    matched_graph_id=m.graph_id,
                )
        return Answer(
            question_id=question_id,
            status=AnswerStatus.UNRESOLVED,
            conflict=conflict,
            matched_graph_id=m.graph_id,
            diagnostic=(
                f"no NEXT predecessor of {conflict.manual_anchor} carries a "
                f"{conflict.category.value} argument"
            ),
        )

    # negation: previous step plus constraint facts around the subgraph
    assert conflict.manual_anchor is not None
    items: list[PayloadItem] = []
    for level in _predecessors_by_distance(m, conflict.manual_anchor):
        items.append(_node_item(m, _later_in_document(m, level)))
        break

    matched = [p.manual_node for p in matching.pairs]
    connected: set[str] = {
        n for n in matched if m.nodes[n].kind is NodeKind.ENTITY
    }
    for node_id in matched:
        connected.update(_entity_neighbors(m, node_id))

    states: dict[str, Argument] = {}
    for entity_id in sorted(
        connected, key=lambda n: (min(m.nodes[n].provenance, default=-1), n)
    ):
        for state in _constraint_states(m, entity_id):
            states[state.id] = state
    for state_id in sorted(states):
        state = states[state_id]
        item = PayloadItem(state.value, state.provenance)
        if item not in items:
            items.append(item)

    if not items:
        return Answer(
            question_id=question_id,
            status=AnswerStatus.UNRESOLVED,
            conflict=conflict,
            matched_graph_id=m.graph_id,
            diagnostic="negated action has no previous step and no constraints",
        )
    return Answer(
        question_id=question_id,
        status=AnswerStatus.ANSWERED,
        payload=tuple(items),
        conflict=conflict,
        matched_graph_id=m.graph_id,
    )


def _no_conflict_answer(
    matching: Matching, m: TaraGraph, question_id: str
) -> Answer:
    items = []
    for pair in matching.pairs:
        item = _node_item(m, pair.manual_node)
        if item not in items:
            items.append(item)
    return Answer(
        question_id=question_id,
        status=AnswerStatus.ANSWERED,
        payload=tuple(items),
        matched_graph_id=m.graph_id,
        diagnostic="no conflict detected; returning the matched span",
    )


def _graph_min_provenance(graph: TaraGraph) -> int:
    values = [
        min(n.provenance) for n in graph.nodes.values() if n.provenance
    ]
    return min(values) if values else 0


def answer_question(
    question: SdpDocument,
    manual_graphs: Sequence[TaraGraph],
    threshold: float = DEFAULT_THRESHOLD,
    lexicon: StateVerbLexicon | None = None,
    merge_threshold: float | None = None,
) -> Answer:
    """Answer a parsed question against the graphs of one manual.

    The question is itself represented as a graph, matched against every
    manual graph; the best aggregate wins (ties: the graph whose earliest
    provenance sentence is smallest, then graph id).
    """
    question_id = question.manual_id
    kwargs = {} if merge_threshold is None else {"merge_threshold": merge_threshold}
    q_graph = build_question_graph(question, lexicon, **kwargs)
    if q_graph is None:
        return Answer(
            question_id=question_id,
            status=AnswerStatus.NO_MATCH,
            diagnostic="no nodes could be extracted from the question",
        )

    best: tuple[float, int, str, Matching, TaraGraph] | None = None
    for manual_graph in manual_graphs:
        matching = match_subgraph(q_graph, manual_graph, threshold)
        if matching is None:
            continue
        key = (
            -matching.aggregate,
            _graph_min_provenance(manual_graph),
            manual_graph.graph_id,
        )
        if best is None or key < best[:3]:
            best = (*key, matching, manual_graph)
    if best is None:
        return Answer(
            question_id=question_id,
            status=AnswerStatus.NO_MATCH,
            diagnostic="no manual graph matched the question above the threshold",
        )

    matching, manual_graph = best[3], best[4]
    conflict = classify_conflict(matching, q_graph, manual_graph)
    if conflict is None:
        return _no_conflict_answer(matching, manual_graph, question_id)
    return resolve(conflict, matching, q_graph, manual_graph, question_id)
