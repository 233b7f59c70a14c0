"""Graph construction from predicate frames.

Node and fact derivation rules, applied to frames in document order:

* an active predicate whose agent is the user becomes an Action node;
* patients of those predicates become Entity nodes (near-duplicate labels
  merge, e.g. "card" folds into an existing "scratch card");
* consecutive Action nodes chain with NEXT edges; an explicit dependency
  between two predicates of one sentence overrides linear order for that
  pair;
* an agent phrase of the form "X of E" yields an ATT argument "X" on the
  entity E; a copular predicate stores the patient as the ATT's FN child,
  any other predicate becomes a STATE child with PATA to the patient;
* an agent phrase that restricts a known entity with attributives ("same
  user") spawns a new entity with a SUB edge to the base one;
* any other non-user agent owns the predicate as a STATE argument, with
  PATA edges to the entities the state affects;
* a state verb with the user itself as agent attaches the STATE to the
  patient entity, since the user entity may not carry states.

Graphs are split by weakly connected components over Action nodes (the
user entity and its AGT edges never bridge components); fact-only islands
join the component with the nearest provenance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .graph import (
    Argument,
    EdgeKind,
    NodeKind,
    TaraEdge,
    TaraGraph,
    TaraNode,
    graph_id_for,
)
from .matching import node_similarity
from .preprocess import (
    USER,
    ArgSlot,
    PredicateFrame,
    extract_frames,
    strip_articles,
)
from .sdp import ACTION_ARG_CATEGORIES, ArgCategory, SdpDocument

logger = logging.getLogger(__name__)

#: Default merge threshold for near-duplicate entity labels.
DEFAULT_MERGE_THRESHOLD = 0.8

#: Value stored in the MOD argument that marks a reversed predicate.
REVERSED_VALUE = "reverse"

DEFAULT_STATE_VERBS = frozenset(
    {
        "have",
        "has",
        "had",
        "having",
        "be",
        "is",
        "are",
        "am",
        "was",
        "were",
        "been",
        "being",
    }
)


@dataclass(frozen=True)
class StateVerbLexicon:
    """Predicates treated as state verbs instead of actions."""

    surfaces: frozenset[str] = DEFAULT_STATE_VERBS

    def __post_init__(self) -> None:
        if not self.surfaces:
            raise ValueError("state verb lexicon must not be empty")

    def __contains__(self, predicate: str) -> bool:
        return predicate.casefold() in self.surfaces

    @classmethod
    def from_file(cls, path: str | Path) -> "StateVerbLexicon":
        """Load one phrase per line; blank lines and '#' comments ignored."""
        surfaces = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                surfaces.add(line.casefold())
        return cls(surfaces=frozenset(surfaces))


@dataclass
class BuildResult:
    graphs: list[TaraGraph]
    diagnostics: list[str] = field(default_factory=list)


def _token_eq(a: str, b: str) -> bool:
    # plural-insensitive comparison of single tokens
    if a == b:
        return True
    for stem, full in ((a, b), (b, a)):
        if full == stem + "s" or full == stem + "es":
            return True
    return False


def _tokens_suffix(shorter: Sequence[str], longer: Sequence[str]) -> bool:
    if not shorter or len(shorter) > len(longer):
        return False
    return all(
        _token_eq(s, l) for s, l in zip(shorter, longer[len(longer) - len(shorter):])
    )


def merge_entities(
    labels: Sequence[str], threshold: float = DEFAULT_MERGE_THRESHOLD
) -> list[list[str]]:
    """Partition labels into merge groups.

    Two labels group when one is a suffix head of the other or their
    similarity reaches the threshold.  Each group lists its canonical
    (longest) label first; groups keep first-occurrence order.
    """
    parent = list(range(len(labels)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    token_lists = [label.split() for label in labels]
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            if (
                _tokens_suffix(token_lists[i], token_lists[j])
                or _tokens_suffix(token_lists[j], token_lists[i])
                or node_similarity(labels[i], labels[j]) >= threshold
            ):
                union(i, j)

    groups: dict[int, list[str]] = {}
    for i, label in enumerate(labels):
        groups.setdefault(find(i), []).append(label)
    ordered = [groups[root] for root in sorted(groups)]
    return [
        sorted(group, key=lambda lab: (-len(lab), group.index(lab)))
        for group in ordered
    ]


class _Builder:
    def __init__(
        self,
        manual_id: str,
        lexicon: StateVerbLexicon,
        merge_threshold: float,
        space_delimited: bool,
    ) -> None:
        self.manual_id = manual_id
        self.lexicon = lexicon
        self.merge_threshold = merge_threshold
        self.space_delimited = space_delimited
        self.nodes: dict[str, TaraNode] = {}
        self.arguments: dict[str, Argument] = {}
        self.edges: list[TaraEdge] = []
        self.diagnostics: list[str] = []
        self._node_seq = 0
        self._arg_seq = 0
        self.user_id = self._add_node(NodeKind.ENTITY, "user", (), is_user=True)
        # action id -> (sentence index, token position) used for NEXT order
        self._action_positions: dict[str, tuple[int, int]] = {}
        # (sentence, span lead) -> action id, for dependency overrides
        self._action_by_span: dict[tuple[int, int], str] = {}
        # (sentence, span lead) -> span leads of governing predicates
        self._frame_heads: dict[tuple[int, int], tuple[int, ...]] = {}

    # -- element creation --------------------------------------------

    def _add_node(
        self,
        kind: NodeKind,
        label: str,
        provenance: Iterable[int],
        is_user: bool = False,
    ) -> str:
        node_id = f"n{self._node_seq:03d}"
        self._node_seq += 1
        self.nodes[node_id] = TaraNode(
            id=node_id,
            kind=kind,
            label=label,
            provenance=tuple(sorted(set(provenance))),
            is_user=is_user,
        )
        return node_id

    def _add_argument(
        self,
        owner: str,
        category: ArgCategory,
        value: str,
        sentence: int,
        surface: str | None = None,
    ) -> str:
        arg_id = f"a{self._arg_seq:03d}"
        self._arg_seq += 1
        self.arguments[arg_id] = Argument(
            id=arg_id,
            owner=owner,
            category=category,
            value=value,
            provenance=(sentence,),
            surface=surface,
        )
        return arg_id

    def _touch_node(self, node_id: str, sentence: int, label: str | None = None) -> None:
        node = self.nodes[node_id]
        provenance = tuple(sorted(set(node.provenance) | {sentence}))
        new_label = node.label
        # canonical label is the longest mention, where longest means more
        # tokens; inflection variants never displace the incumbent
        if label is not None and len(label.split()) > len(node.label.split()):
            new_label = label
        self.nodes[node_id] = TaraNode(
            id=node.id,
            kind=node.kind,
            label=new_label,
            provenance=provenance,
            is_user=node.is_user,
        )

    # -- entity resolution ---------------------------------------------

    def _normalize_entity(self, phrase: str) -> str:
        return " ".join(
            strip_articles(phrase.casefold(), drop_numerals=True).split()
        )

    def _find_entity(self, label: str) -> str | None:
        tokens = label.split()
        best_sim: tuple[float, str] | None = None
        for node_id, node in self.nodes.items():
            if node.kind is not NodeKind.ENTITY:
                continue
            other = node.label.split()
            if _tokens_suffix(tokens, other) and len(tokens) <= len(other):
                return node_id
            sim = node_similarity(label, node.label)
            if sim >= self.merge_threshold:
                if best_sim is None or sim > best_sim[0]:
                    best_sim = (sim, node_id)
        return best_sim[1] if best_sim else None

    def entity_reference(
        self, phrase: str, sentence: int, spawn_sub: bool = True
    ) -> str:
        """Resolve a phrase to an entity node, creating one when needed.

        A phrase that restricts an existing entity with attributive
        modifiers spawns a new entity with a SUB edge to the base one.
        """
        label = self._normalize_entity(phrase)
        found = self._find_entity(label)
        if found is not None:
            self._touch_node(found, sentence, label)
            return found
        tokens = label.split()
        if spawn_sub and len(tokens) > 1:
            for start in range(1, len(tokens)):
                base = self._find_entity(" ".join(tokens[start:]))
                if base is not None:
                    sub_id = self._add_node(NodeKind.ENTITY, label, (sentence,))
                    self.edges.append(TaraEdge(EdgeKind.SUB, sub_id, base))
                    self._touch_node(base, sentence)
                    return sub_id
        return self._add_node(NodeKind.ENTITY, label, (sentence,))

    # -- frame handling --------------------------------------------------

    def consume(self, frames: Sequence[PredicateFrame]) -> None:
        self._frame_heads = {
            (frame.sentence_index, frame.span[0]): frame.predicate_heads
            for frame in frames
        }
        for frame in frames:
            predicate = frame.predicate.casefold()
            if frame.agent is USER and predicate not in self.lexicon:
                self._consume_action(frame, predicate)
            else:
                self._consume_fact(frame, predicate)

    def _consume_action(self, frame: PredicateFrame, predicate: str) -> None:
        sentence = frame.sentence_index
        action_id = self._add_node(NodeKind.ACTION, predicate, (sentence,))
        self.edges.append(TaraEdge(EdgeKind.AGT, self.user_id, action_id))
        self._touch_node(self.user_id, sentence)
        self._action_positions[action_id] = (sentence, frame.span[0])
        self._action_by_span[(sentence, frame.span[0])] = action_id
        if frame.reversed:
            self._add_argument(action_id, ArgCategory.MOD, REVERSED_VALUE, sentence)
        patient_ids = []
        for patient in self._patients(frame):
            entity_id = self.entity_reference(patient, sentence)
            self.edges.append(TaraEdge(EdgeKind.PAT, action_id, entity_id))
            patient_ids.append(entity_id)
        for slot in frame.slots:
            if slot.category in ACTION_ARG_CATEGORIES:
                self._add_argument(
                    action_id,
                    slot.category,
                    slot.value.casefold(),
                    sentence,
                    surface=slot.surface,
                )
            elif slot.category is ArgCategory.FN and patient_ids:
                self._add_argument(
                    patient_ids[0],
                    ArgCategory.FN,
                    slot.value.casefold(),
                    sentence,
                    surface=slot.surface,
                )
            else:
                self.diagnostics.append(
                    f"sentence {sentence}: {slot.category.value} slot "
                    f"{slot.surface!r} on action {predicate!r} has no carrier"
                )

    def _patients(self, frame: PredicateFrame) -> list[str]:
        patients = []
        if isinstance(frame.patient, str):
            patients.append(frame.patient)
        patients.extend(frame.extra_patients)
        return patients

    def _consume_fact(self, frame: PredicateFrame, predicate: str) -> None:
        sentence = frame.sentence_index
        if frame.agent is None:
            self.diagnostics.append(
                f"sentence {sentence}: fact {predicate!r} has no agent; dropped"
            )
            return
        if frame.agent is USER:
            self._consume_user_state(frame, predicate)
            return

        agent_phrase = str(frame.agent)
        attribute = self._split_attribute(agent_phrase)
        if attribute is not None:
            self._consume_attribute_fact(frame, predicate, *attribute)
            return

        owner_id = self.entity_reference(agent_phrase, sentence)
        if self.nodes[owner_id].is_user:
            self._consume_user_state(frame, predicate)
            return
        state_id = self._add_argument(owner_id, ArgCategory.STATE, predicate, sentence)
        self._attach_state_details(state_id, frame)
        self._attach_pata(state_id, self._patients(frame), sentence)

    def _consume_user_state(self, frame: PredicateFrame, predicate: str) -> None:
        # the user entity may not carry states; the affected patient does
        sentence = frame.sentence_index
        patients = self._patients(frame)
        if not patients:
            self.diagnostics.append(
                f"sentence {sentence}: state {predicate!r} of the user has no "
                "patient to carry it; dropped"
            )
            return
        owner_id = self.entity_reference(patients[0], sentence)
        if self.nodes[owner_id].is_user:
            self.diagnostics.append(
                f"sentence {sentence}: state {predicate!r} would attach to the "
                "user entity; dropped"
            )
            return
        self._touch_node(self.user_id, sentence)
        state_id = self._add_argument(owner_id, ArgCategory.STATE, predicate, sentence)
        self._attach_state_details(state_id, frame)
        self._attach_pata(state_id, patients[1:], sentence)

    def _consume_attribute_fact(
        self, frame: PredicateFrame, predicate: str, attr: str, entity_phrase: str
    ) -> None:
        sentence = frame.sentence_index
        owner_id = self.entity_reference(entity_phrase, sentence)
        copular = predicate in self.lexicon
        if self.nodes[owner_id].is_user and not copular:
            self.diagnostics.append(
                f"sentence {sentence}: constraint {predicate!r} on an attribute of "
                "the user cannot be represented; dropped"
            )
            return
        att_id = self._add_argument(owner_id, ArgCategory.ATT, attr, sentence)
        fn_values = [
            (slot.value.casefold(), slot.surface)
            for slot in frame.slots
            if slot.category is ArgCategory.FN
        ]
        if copular:
            for patient in self._patients(frame):
                fn_values.append(
                    (strip_articles(patient.casefold()), patient)
                )
            for value, surface in fn_values:
                self._add_argument(
                    att_id, ArgCategory.FN, value, sentence, surface=surface
                )
        else:
            for value, surface in fn_values:
                self._add_argument(
                    att_id, ArgCategory.FN, value, sentence, surface=surface
                )
            state_id = self._add_argument(
                att_id, ArgCategory.STATE, predicate, sentence
            )
            self._attach_state_details(state_id, frame)
            self._attach_pata(state_id, self._patients(frame), sentence)

    def _attach_state_details(self, state_id: str, frame: PredicateFrame) -> None:
        sentence = frame.sentence_index
        for slot in frame.slots:
            if slot.category in ACTION_ARG_CATEGORIES:
                self._add_argument(
                    state_id,
                    slot.category,
                    slot.value.casefold(),
                    sentence,
                    surface=slot.surface,
                )

    def _attach_pata(
        self, state_id: str, patients: Sequence[str], sentence: int
    ) -> None:
        for patient in patients:
            entity_id = self.entity_reference(patient, sentence)
            if self.nodes[entity_id].is_user:
                self.diagnostics.append(
                    f"sentence {sentence}: PATA to the user entity dropped"
                )
                continue
            self.edges.append(TaraEdge(EdgeKind.PATA, state_id, entity_id))

    def _split_attribute(self, phrase: str) -> tuple[str, str] | None:
        if not self.space_delimited:
            return None
        normalized = strip_articles(phrase.casefold())
        attr, separator, rest = normalized.partition(" of ")
        if not separator:
            return None
        attr = attr.strip()
        entity = strip_articles(rest.strip())
        if not attr or not entity:
            return None
        return attr, entity

    # -- ordering and segmentation ---------------------------------------

    def _chain_actions(self, max_next_gap: int | None = None) -> None:
        ordered = self._ordered_actions()
        for left, right in zip(ordered, ordered[1:]):
            gap = (
                self._action_positions[right][0] - self._action_positions[left][0]
            )
            if max_next_gap is not None and gap > max_next_gap:
                continue
            self.edges.append(TaraEdge(EdgeKind.NEXT, left, right))

    def _ordered_actions(self) -> list[str]:
        """Document order, with same-sentence dependency overrides.

        Within a sentence the governing predicate precedes its dependent,
        regardless of token order.
        """
        by_sentence: dict[int, list[str]] = {}
        for action_id, (sentence, _) in sorted(
            self._action_positions.items(), key=lambda kv: kv[1]
        ):
            by_sentence.setdefault(sentence, []).append(action_id)

        heads: dict[str, set[str]] = {}
        for frame_key, action_id in self._action_by_span.items():
            sentence = frame_key[0]
            frame_heads = self._frame_heads.get(frame_key, ())
            for head_span in frame_heads:
                head_id = self._action_by_span.get((sentence, head_span))
                if head_id is not None and head_id != action_id:
                    heads.setdefault(action_id, set()).add(head_id)

        ordered: list[str] = []
        for sentence in sorted(by_sentence):
            group = by_sentence[sentence]
            placed: list[str] = []
            pending = list(group)
            while pending:
                progressed = False
                for candidate in list(pending):
                    outstanding = heads.get(candidate, set()) & set(pending)
                    if not outstanding - {candidate}:
                        placed.append(candidate)
                        pending.remove(candidate)
                        progressed = True
                if not progressed:  # dependency tie, fall back to token order
                    placed.extend(pending)
                    break
            ordered.extend(placed)
        return ordered

    # -- output -----------------------------------------------------------

    def split_components(self) -> list[TaraGraph]:
        action_ids = [
            n for n, node in self.nodes.items() if node.kind is NodeKind.ACTION
        ]
        if not action_ids:
            return []

        parent: dict[str, str] = {
            n: n for n in self.nodes if not self.nodes[n].is_user
        }

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a: str, b: str) -> None:
            if a in parent and b in parent:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)

        def chain_root(element_id: str) -> str:
            while element_id in self.arguments:
                element_id = self.arguments[element_id].owner
            return element_id

        for edge in self.edges:
            if edge.kind is EdgeKind.AGT:
                continue
            src = chain_root(edge.src)
            union(src, edge.dst)

        components: dict[str, set[str]] = {}
        for node_id in parent:
            components.setdefault(find(node_id), set()).add(node_id)

        with_actions = []
        orphans = []
        for members in components.values():
            if any(self.nodes[m].kind is NodeKind.ACTION for m in members):
                with_actions.append(members)
            else:
                orphans.append(members)
        with_actions.sort(key=lambda members: min(members))

        def min_provenance(members: set[str]) -> int:
            values = [
                min(self.nodes[m].provenance)
                for m in members
                if self.nodes[m].provenance
            ]
            return min(values) if values else 0

        for orphan in sorted(orphans, key=min_provenance):
            target = min(
                range(len(with_actions)),
                key=lambda i: (
                    abs(min_provenance(with_actions[i]) - min_provenance(orphan)),
                    i,
                ),
            )
            self.diagnostics.append(
                "fact island {%s} attached to task %d"
                % (", ".join(sorted(orphan)), target)
            )
            with_actions[target] |= orphan

        graphs = []
        for members in with_actions:
            graphs.append(self._graph_for(members))
        return graphs

    def _graph_for(self, members: set[str]) -> TaraGraph:
        keep_nodes = {self.user_id} | members
        nodes = {n: self.nodes[n] for n in sorted(keep_nodes)}
        arguments = {}

        def chain_root(element_id: str) -> str:
            while element_id in self.arguments:
                element_id = self.arguments[element_id].owner
            return element_id

        for arg_id, argument in self.arguments.items():
            if chain_root(arg_id) in keep_nodes:
                arguments[arg_id] = argument
        edges = tuple(
            e
            for e in self.edges
            if (e.src in keep_nodes or e.src in arguments) and e.dst in keep_nodes
        )
        labels = [nodes[n].label for n in sorted(nodes)]
        return TaraGraph(
            graph_id=graph_id_for(self.manual_id, labels),
            manual_id=self.manual_id,
            nodes=nodes,
            arguments=arguments,
            edges=edges,
        )

    def whole_graph(self, graph_id_salt: str = "") -> TaraGraph:
        labels = [self.nodes[n].label for n in sorted(self.nodes)]
        return TaraGraph(
            graph_id=graph_id_for(self.manual_id + graph_id_salt, labels),
            manual_id=self.manual_id,
            nodes=dict(self.nodes),
            arguments=dict(self.arguments),
            edges=tuple(self.edges),
        )


def build(
    frames: Sequence[PredicateFrame],
    lexicon: StateVerbLexicon | None = None,
    *,
    manual_id: str = "manual",
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD,
    space_delimited: bool = True,
    max_next_gap: int | None = None,
) -> BuildResult:
    """Build one graph per task described by the frames.

    Returns an empty graph list with a NoActionFound diagnostic when no
    frame qualifies as an Action.
    """
    builder = _Builder(manual_id, lexicon or StateVerbLexicon(), merge_threshold,
                       space_delimited)
    builder.consume(frames)
    builder._chain_actions(max_next_gap)
    graphs = builder.split_components()
    diagnostics = list(builder.diagnostics)
    if not graphs:
        diagnostics.append(f"NoActionFound: manual {manual_id!r} has no user actions")
    return BuildResult(graphs=graphs, diagnostics=diagnostics)


def build_question(
    frames: Sequence[PredicateFrame],
    lexicon: StateVerbLexicon | None = None,
    *,
    question_id: str = "question",
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD,
    space_delimited: bool = True,
) -> TaraGraph | None:
    """Build a single graph for a question.

    Questions need no Action node (factoid questions about an entity have
    none) and are never split into components.  Returns None when nothing
    but the user entity could be extracted.
    """
    builder = _Builder(question_id, lexicon or StateVerbLexicon(), merge_threshold,
                       space_delimited)
    builder.consume(frames)
    builder._chain_actions()
    if len(builder.nodes) <= 1:
        return None
    return builder.whole_graph()


def build_manual(
    doc: SdpDocument,
    lexicon: StateVerbLexicon | None = None,
    *,
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD,
    max_next_gap: int | None = None,
) -> BuildResult:
    """Extract frames from a document and build its graphs."""
    return build(
        extract_frames(doc),
        lexicon,
        manual_id=doc.manual_id,
        merge_threshold=merge_threshold,
        space_delimited=doc.space_delimited,
        max_next_gap=max_next_gap,
    )


def build_question_graph(
    doc: SdpDocument,
    lexicon: StateVerbLexicon | None = None,
    *,
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD,
) -> TaraGraph | None:
    return build_question(
        extract_frames(doc),
        lexicon,
        question_id=doc.manual_id,
        merge_threshold=merge_threshold,
        space_delimited=doc.space_delimited,
    )
