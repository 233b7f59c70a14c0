"""Heterogeneous step/fact graph: data model, validation, queries, I/O.

A graph holds Action and Entity nodes, three argument families (Action-ARG
on actions, Entity-ARG on entities, ARG-ARG below ATT/STATE arguments) and
five edge kinds.  ATT and STATE are always arguments, never nodes; the
model makes the distinction unrepresentable rather than discouraged.

Graph file layout (also the gold-annotation interchange format)::

    {"graph_id": str, "manual_id": str,
     "nodes": [{"id", "kind", "label", "provenance", "is_user"?}],
     "args":  [{"id", "owner", "category", "value", "surface"?, "provenance"}],
     "edges": [{"kind", "src", "dst"}]}

Serialization is deterministic: nodes and arguments sort by id, edges by
(kind, src, dst), keys are sorted and whitespace is normalized, so two
structurally equal graphs produce identical bytes.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import MalformedGraphFile, UnknownElement
from .sdp import ACTION_ARG_CATEGORIES, ENTITY_ARG_CATEGORIES, ArgCategory


class NodeKind(enum.Enum):
    ACTION = "Action"
    ENTITY = "Entity"


class EdgeKind(enum.Enum):
    NEXT = "NEXT"
    AGT = "AGT"
    PAT = "PAT"
    SUB = "SUB"
    PATA = "PATA"


@dataclass(frozen=True)
class TaraNode:
    id: str
    kind: NodeKind
    label: str
    provenance: tuple[int, ...]
    is_user: bool = False


@dataclass(frozen=True)
class Argument:
    """A typed argument owned by a node or by another argument."""

    id: str
    owner: str
    category: ArgCategory
    value: str
    provenance: tuple[int, ...]
    surface: str | None = None


@dataclass(frozen=True)
class TaraEdge:
    kind: EdgeKind
    src: str
    dst: str


def _edge_sort_key(edge: TaraEdge) -> tuple[str, str, str]:
    return (edge.kind.value, edge.src, edge.dst)


@dataclass
class TaraGraph:
    """Immutable after construction by convention; builders use own state."""

    graph_id: str
    manual_id: str
    nodes: dict[str, TaraNode] = field(default_factory=dict)
    arguments: dict[str, Argument] = field(default_factory=dict)
    edges: tuple[TaraEdge, ...] = ()

    def __post_init__(self) -> None:
        self.edges = tuple(sorted(self.edges, key=_edge_sort_key))

    # -- element access -------------------------------------------------

    def node(self, node_id: str) -> TaraNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownElement(f"no node {node_id!r}") from None

    def argument(self, arg_id: str) -> Argument:
        try:
            return self.arguments[arg_id]
        except KeyError:
            raise UnknownElement(f"no argument {arg_id!r}") from None

    def element_provenance(self, element_id: str) -> tuple[int, ...]:
        if element_id in self.nodes:
            return self.nodes[element_id].provenance
        return self.argument(element_id).provenance

    @property
    def user(self) -> TaraNode | None:
        for node in self.nodes.values():
            if node.is_user:
                return node
        return None

    def actions(self) -> list[TaraNode]:
        return self._ordered(n for n in self.nodes.values() if n.kind is NodeKind.ACTION)

    def entities(self) -> list[TaraNode]:
        return self._ordered(n for n in self.nodes.values() if n.kind is NodeKind.ENTITY)

    @staticmethod
    def _ordered(nodes: Iterable[TaraNode]) -> list[TaraNode]:
        return sorted(nodes, key=lambda n: (min(n.provenance, default=-1), n.id))

    def arguments_of(self, owner_id: str) -> list[Argument]:
        return sorted(
            (a for a in self.arguments.values() if a.owner == owner_id),
            key=lambda a: a.id,
        )

    def argument_values(
        self, owner_id: str, category: ArgCategory
    ) -> list[Argument]:
        return [a for a in self.arguments_of(owner_id) if a.category is category]

    def edges_of_kind(self, kind: EdgeKind) -> list[TaraEdge]:
        return [e for e in self.edges if e.kind is kind]

    def has_edge(self, kind: EdgeKind, src: str, dst: str) -> bool:
        return TaraEdge(kind, src, dst) in self.edges

    def next_in(self, node_id: str) -> list[str]:
        return [e.src for e in self.edges if e.kind is EdgeKind.NEXT and e.dst == node_id]

    def next_out(self, node_id: str) -> list[str]:
        return [e.dst for e in self.edges if e.kind is EdgeKind.NEXT and e.src == node_id]


def graph_id_for(manual_id: str, labels: Sequence[str]) -> str:
    """Stable content hash so re-builds of the same manual are reproducible."""
    digest = hashlib.sha256()
    digest.update(manual_id.encode("utf-8"))
    for label in labels:
        digest.update(b"\x00")
        digest.update(label.encode("utf-8"))
    return digest.hexdigest()[:16]


# -- validation ----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    elements: tuple[str, ...] = ()


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, *elements: str) -> None:
        self.violations.append(Violation(code, message, tuple(elements)))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def owner_chain_root(graph: TaraGraph, argument: Argument) -> TaraNode | None:
    """The node an argument ultimately belongs to, following ARG-ARG owners."""
    seen = set()
    owner = argument.owner
    while owner in graph.arguments:
        if owner in seen:
            return None
        seen.add(owner)
        owner = graph.arguments[owner].owner
    return graph.nodes.get(owner)


def validate(graph: TaraGraph) -> ValidationReport:
    """List every violated structural invariant; empty report iff well-formed."""
    report = ValidationReport()
    users = [n for n in graph.nodes.values() if n.is_user]
    if len(users) != 1:
        report.add("user-count", f"expected exactly one user entity, found {len(users)}")
    user = users[0] if users else None
    if user is not None and user.kind is not NodeKind.ENTITY:
        report.add("user-kind", "user node must be an Entity", user.id)

    for node in graph.nodes.values():
        if not node.label:
            report.add("empty-label", f"node {node.id} has an empty label", node.id)
        if not node.provenance and not node.is_user:
            report.add("no-provenance", f"node {node.id} lacks provenance", node.id)

    for argument in graph.arguments.values():
        if not argument.provenance:
            report.add(
                "no-provenance", f"argument {argument.id} lacks provenance", argument.id
            )
        owner_node = graph.nodes.get(argument.owner)
        owner_arg = graph.arguments.get(argument.owner)
        if owner_node is None and owner_arg is None:
            report.add(
                "dangling-owner",
                f"argument {argument.id} owned by missing element {argument.owner}",
                argument.id,
            )
            continue
        if owner_node is not None:
            allowed = (
                ACTION_ARG_CATEGORIES
                if owner_node.kind is NodeKind.ACTION
                else ENTITY_ARG_CATEGORIES
            )
            if argument.category not in allowed:
                report.add(
                    "category-typing",
                    f"argument {argument.id} ({argument.category.value}) cannot attach "
                    f"to {owner_node.kind.value} node {owner_node.id}",
                    argument.id,
                    owner_node.id,
                )
        else:
            if owner_arg.category is ArgCategory.ATT:
                allowed = ENTITY_ARG_CATEGORIES
            elif owner_arg.category is ArgCategory.STATE:
                allowed = ACTION_ARG_CATEGORIES
            else:
                report.add(
                    "arg-arg-owner",
                    f"argument {argument.id} attaches to {owner_arg.category.value} "
                    f"argument {owner_arg.id}; only ATT and STATE own arguments",
                    argument.id,
                    owner_arg.id,
                )
                continue
            if argument.category not in allowed:
                report.add(
                    "category-typing",
                    f"argument {argument.id} ({argument.category.value}) cannot attach "
                    f"to {owner_arg.category.value} argument {owner_arg.id}",
                    argument.id,
                    owner_arg.id,
                )
        if argument.category is ArgCategory.STATE:
            root = owner_chain_root(graph, argument)
            if root is not None and root.is_user:
                report.add(
                    "state-on-user",
                    f"STATE argument {argument.id} attaches to the user entity",
                    argument.id,
                )

    _validate_edges(graph, report, user)
    _validate_next_acyclic(graph, report)

    if user is not None:
        agt_targets = {
            e.dst for e in graph.edges if e.kind is EdgeKind.AGT and e.src == user.id
        }
        for node in graph.nodes.values():
            if node.kind is NodeKind.ACTION and node.id not in agt_targets:
                report.add(
                    "action-without-agt",
                    f"Action {node.id} has no AGT edge from the user",
                    node.id,
                )
    return report


def _validate_edges(
    graph: TaraGraph, report: ValidationReport, user: TaraNode | None
) -> None:
    for edge in graph.edges:
        src_node = graph.nodes.get(edge.src)
        src_arg = graph.arguments.get(edge.src)
        dst_node = graph.nodes.get(edge.dst)
        if dst_node is None:
            report.add(
                "dangling-edge",
                f"{edge.kind.value} edge targets missing node {edge.dst}",
                edge.dst,
            )
            continue
        if edge.kind is EdgeKind.PATA:
            if src_arg is None or src_arg.category is not ArgCategory.STATE:
                report.add(
                    "edge-typing",
                    f"PATA edge must start at a STATE argument, got {edge.src}",
                    edge.src,
                )
            if dst_node.kind is not NodeKind.ENTITY:
                report.add(
                    "edge-typing", f"PATA edge must target an Entity, got {edge.dst}",
                    edge.dst,
                )
            if dst_node.is_user:
                report.add(
                    "pata-on-user", "PATA edge targets the user entity", edge.dst
                )
            continue
        if src_node is None:
            report.add(
                "dangling-edge",
                f"{edge.kind.value} edge starts at missing node {edge.src}",
                edge.src,
            )
            continue
        expected = {
            EdgeKind.NEXT: (NodeKind.ACTION, NodeKind.ACTION),
            EdgeKind.AGT: (NodeKind.ENTITY, NodeKind.ACTION),
            EdgeKind.PAT: (NodeKind.ACTION, NodeKind.ENTITY),
            EdgeKind.SUB: (NodeKind.ENTITY, NodeKind.ENTITY),
        }[edge.kind]
        if (src_node.kind, dst_node.kind) != expected:
            report.add(
                "edge-typing",
                f"{edge.kind.value} edge {edge.src}->{edge.dst} violates "
                f"{expected[0].value}->{expected[1].value} typing",
                edge.src,
                edge.dst,
            )
        if edge.kind is EdgeKind.AGT and (user is None or edge.src != user.id):
            report.add(
                "agt-source",
                f"AGT edge {edge.src}->{edge.dst} does not start at the user entity",
                edge.src,
            )


def _validate_next_acyclic(graph: TaraGraph, report: ValidationReport) -> None:
    color: dict[str, int] = {}

    def visit(node_id: str) -> bool:
        color[node_id] = 1
        for succ in graph.next_out(node_id):
            state = color.get(succ, 0)
            if state == 1 or (state == 0 and visit(succ)):
                return True
        color[node_id] = 2
        return False

    for node in graph.nodes.values():
        if color.get(node.id, 0) == 0 and visit(node.id):
            report.add("next-cycle", "NEXT edges form a cycle", node.id)
            return


# -- basic questions ------------------------------------------------------

#: Context arity of each basic question.
BASIC_QUESTION_ARITY = {
    "B1": 0,
    "B2": 0,
    "B3": 1,
    "B4": 1,
    "B5": 1,
    "B6": 2,
    "B7": 2,
    "B8": 2,
    "B9": 2,
}


def answer_basic(
    graph: TaraGraph, question: str, context: Sequence[str] = ()
) -> list[str] | bool:
    """Answer one of the nine basic queries over a graph.

    B1/B2 list node labels; B3 lists Action-ARG values of an action, B4
    Entity-ARG values of an entity, B5 the child values of an argument;
    B6-B9 test NEXT / PAT / SUB / PATA membership between the two context
    elements.
    """
    if question not in BASIC_QUESTION_ARITY:
        raise UnknownElement(f"unknown basic question {question!r}")
    arity = BASIC_QUESTION_ARITY[question]
    if len(context) != arity:
        raise UnknownElement(
            f"{question} requires {arity} context ids, got {len(context)}"
        )
    if question == "B1":
        return [node.label for node in graph.actions()]
    if question == "B2":
        return [node.label for node in graph.entities()]
    if question == "B3":
        node = graph.node(context[0])
        if node.kind is not NodeKind.ACTION:
            raise UnknownElement(f"{context[0]} is not an Action node")
        return [a.value for a in graph.arguments_of(node.id)]
    if question == "B4":
        node = graph.node(context[0])
        if node.kind is not NodeKind.ENTITY:
            raise UnknownElement(f"{context[0]} is not an Entity node")
        return [a.value for a in graph.arguments_of(node.id)]
    if question == "B5":
        argument = graph.argument(context[0])
        return [a.value for a in graph.arguments_of(argument.id)]
    if question == "B6":
        a1, a2 = graph.node(context[0]), graph.node(context[1])
        return graph.has_edge(EdgeKind.NEXT, a1.id, a2.id)
    if question == "B7":
        action, entity = graph.node(context[0]), graph.node(context[1])
        return graph.has_edge(EdgeKind.PAT, action.id, entity.id)
    if question == "B8":
        sub, parent = graph.node(context[0]), graph.node(context[1])
        return graph.has_edge(EdgeKind.SUB, sub.id, parent.id)
    state, entity = graph.argument(context[0]), graph.node(context[1])
    return graph.has_edge(EdgeKind.PATA, state.id, entity.id)


# -- serialization --------------------------------------------------------


def graph_to_dict(graph: TaraGraph) -> dict:
    nodes = []
    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        entry: dict = {
            "id": node.id,
            "kind": node.kind.value,
            "label": node.label,
            "provenance": list(node.provenance),
        }
        if node.is_user:
            entry["is_user"] = True
        nodes.append(entry)
    args = []
    for argument in sorted(graph.arguments.values(), key=lambda a: a.id):
        entry = {
            "id": argument.id,
            "owner": argument.owner,
            "category": argument.category.value,
            "value": argument.value,
            "provenance": list(argument.provenance),
        }
        if argument.surface is not None:
            entry["surface"] = argument.surface
        args.append(entry)
    edges = [
        {"kind": e.kind.value, "src": e.src, "dst": e.dst}
        for e in sorted(graph.edges, key=_edge_sort_key)
    ]
    return {
        "graph_id": graph.graph_id,
        "manual_id": graph.manual_id,
        "nodes": nodes,
        "args": args,
        "edges": edges,
    }


def serialize_graph(graph: TaraGraph) -> bytes:
    payload = json.dumps(
        graph_to_dict(graph), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )
    return (payload + "\n").encode("utf-8")


def graph_from_dict(raw: object) -> TaraGraph:
    if not isinstance(raw, dict):
        raise MalformedGraphFile("graph root must be an object")
    try:
        graph_id = raw["graph_id"]
        manual_id = raw["manual_id"]
        raw_nodes = raw["nodes"]
        raw_args = raw["args"]
        raw_edges = raw["edges"]
    except KeyError as exc:
        raise MalformedGraphFile(f"graph file misses field {exc.args[0]!r}") from None
    if not isinstance(graph_id, str) or not isinstance(manual_id, str):
        raise MalformedGraphFile("graph_id and manual_id must be strings")

    nodes: dict[str, TaraNode] = {}
    try:
        for entry in raw_nodes:
            node = TaraNode(
                id=entry["id"],
                kind=NodeKind(entry["kind"]),
                label=entry["label"],
                provenance=tuple(entry["provenance"]),
                is_user=bool(entry.get("is_user", False)),
            )
            if node.id in nodes:
                raise MalformedGraphFile(f"duplicate node id {node.id!r}")
            nodes[node.id] = node
        arguments: dict[str, Argument] = {}
        for entry in raw_args:
            argument = Argument(
                id=entry["id"],
                owner=entry["owner"],
                category=ArgCategory(entry["category"]),
                value=entry["value"],
                provenance=tuple(entry["provenance"]),
                surface=entry.get("surface"),
            )
            if argument.id in arguments or argument.id in nodes:
                raise MalformedGraphFile(f"duplicate element id {argument.id!r}")
            arguments[argument.id] = argument
        edges = tuple(
            TaraEdge(kind=EdgeKind(entry["kind"]), src=entry["src"], dst=entry["dst"])
            for entry in raw_edges
        )
    except MalformedGraphFile:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedGraphFile(f"malformed graph element: {exc}") from exc
    return TaraGraph(
        graph_id=graph_id,
        manual_id=manual_id,
        nodes=nodes,
        arguments=arguments,
        edges=edges,
    )


def deserialize_graph(data: Union[bytes, str, Path]) -> TaraGraph:
    if isinstance(data, Path):
        text = data.read_text(encoding="utf-8")
    elif isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedGraphFile(f"invalid JSON: {exc}") from exc
    return graph_from_dict(raw)
