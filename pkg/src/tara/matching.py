"""String similarity and question-to-manual node matching.

Similarity between two phrases is ``1 - D/max(|x|, |y|)`` with D the
character-level Levenshtein distance; it is symmetric and bounded to
[0, 1] but deliberately not a metric.

Matching assigns question nodes to manual nodes of the same kind,
maximizing the total similarity of kept pairs (assignment-optimal within
each kind class, not structural isomorphism: question graphs carry one to
three nodes and edge compatibility adds nothing at that size).  Pairs
below the threshold are dropped; user entities are structural defaults
present in every graph and are excluded from matching.  Ties are broken
by earliest manual sentence provenance, then smaller node id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import SizeGuardExceeded
from .graph import NodeKind, TaraGraph, TaraNode

#: Default similarity a pair must reach to be kept.
DEFAULT_THRESHOLD = 0.5

#: Node-count guards for the exhaustive oracle.
BRUTE_FORCE_MAX_QUESTION = 6
BRUTE_FORCE_MAX_MANUAL = 8

_TOTAL_TOLERANCE = 1e-12

SimilarityFn = Callable[[str, str], float]


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over characters."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ch_a != ch_b),
                )
            )
        previous = current
    return previous[-1]


def node_similarity(x: str, y: str) -> float:
    """Similarity in [0, 1]; two empty phrases count as identical."""
    longest = max(len(x), len(y))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(x, y) / longest


@dataclass(frozen=True)
class MatchPair:
    question_node: str
    manual_node: str
    score: float


@dataclass(frozen=True)
class Matching:
    """Injective, kind-respecting node correspondence."""

    pairs: tuple[MatchPair, ...]
    aggregate: float
    manual_graph_id: str

    def manual_for(self, question_node: str) -> str | None:
        for pair in self.pairs:
            if pair.question_node == question_node:
                return pair.manual_node
        return None


def _matchable(graph: TaraGraph, kind: NodeKind) -> list[TaraNode]:
    nodes = [
        n for n in graph.nodes.values() if n.kind is kind and not n.is_user
    ]
    return sorted(nodes, key=lambda n: (min(n.provenance, default=10 ** 9), n.id))


def _score_matrix(
    q_nodes: Sequence[TaraNode],
    m_nodes: Sequence[TaraNode],
    threshold: float,
    similarity: SimilarityFn,
) -> list[list[float]]:
    matrix = []
    for q in q_nodes:
        row = []
        for m in m_nodes:
            score = similarity(q.label, m.label)
            row.append(score if score >= threshold and score > 0.0 else 0.0)
        matrix.append(row)
    return matrix


def _hungarian_total(matrix: Sequence[Sequence[float]]) -> float:
    if not matrix or not matrix[0]:
        return 0.0
    array = np.asarray(matrix, dtype=float)
    rows, cols = linear_sum_assignment(array, maximize=True)
    return math.fsum(array[r, c] for r, c in zip(rows, cols))


def _lexicographic_assignment(
    matrix: Sequence[Sequence[float]],
) -> list[int | None]:
    """Assignment reaching the optimal total, earliest columns preferred.

    Rows are processed in order; each row takes the first positive-score
    column that still allows the remaining rows to reach the optimum.
    """
    rows = len(matrix)
    if rows == 0:
        return []
    total = _hungarian_total(matrix)
    chosen: list[int | None] = []
    used: set[int] = set()
    fixed = 0.0
    for i in range(rows):
        pick: int | None = None
        for j in range(len(matrix[i])):
            if j in used or matrix[i][j] <= 0.0:
                continue
            remaining = _submatrix_total(matrix, i + 1, used | {j})
            if fixed + matrix[i][j] + remaining >= total - _TOTAL_TOLERANCE:
                pick = j
                break
        chosen.append(pick)
        if pick is not None:
            used.add(pick)
            fixed += matrix[i][pick]
    return chosen


def _submatrix_total(
    matrix: Sequence[Sequence[float]], first_row: int, used: set[int]
) -> float:
    sub = [
        [value for j, value in enumerate(row) if j not in used]
        for row in matrix[first_row:]
    ]
    return _hungarian_total(sub)


def _pairs_for_kind(
    q: TaraGraph,
    m: TaraGraph,
    kind: NodeKind,
    threshold: float,
    similarity: SimilarityFn,
    assign: Callable[[Sequence[Sequence[float]]], list[int | None]],
) -> list[MatchPair]:
    q_nodes = _matchable(q, kind)
    m_nodes = _matchable(m, kind)
    if not q_nodes or not m_nodes:
        return []
    matrix = _score_matrix(q_nodes, m_nodes, threshold, similarity)
    assignment = assign(matrix)
    pairs = []
    for i, j in enumerate(assignment):
        if j is not None and matrix[i][j] > 0.0:
            pairs.append(MatchPair(q_nodes[i].id, m_nodes[j].id, matrix[i][j]))
    return pairs


def _finish(q: TaraGraph, m: TaraGraph, pairs: list[MatchPair]) -> Matching | None:
    if not pairs:
        return None
    question_has_actions = any(
        n.kind is NodeKind.ACTION for n in q.nodes.values()
    )
    if question_has_actions:
        matched_actions = any(
            q.nodes[p.question_node].kind is NodeKind.ACTION for p in pairs
        )
        if not matched_actions:
            return None
    ordered = tuple(sorted(pairs, key=lambda p: p.question_node))
    aggregate = math.fsum(p.score for p in ordered) / len(ordered)
    return Matching(pairs=ordered, aggregate=aggregate, manual_graph_id=m.graph_id)


def match_subgraph(
    q: TaraGraph,
    m: TaraGraph,
    threshold: float = DEFAULT_THRESHOLD,
    similarity: SimilarityFn = node_similarity,
) -> Matching | None:
    """Best node correspondence between a question graph and a manual graph.

    Returns None (no match) when nothing survives the threshold, or when
    the question has Action nodes but none of them matched.
    """
    pairs = []
    for kind in (NodeKind.ACTION, NodeKind.ENTITY):
        pairs.extend(
            _pairs_for_kind(q, m, kind, threshold, similarity,
                            _lexicographic_assignment)
        )
    return _finish(q, m, pairs)


def _exhaustive_assignment(
    matrix: Sequence[Sequence[float]],
) -> list[int | None]:
    rows = len(matrix)
    best_total = -1.0
    best_key: tuple[float, ...] = ()
    best: list[int | None] = [None] * rows
    columns = len(matrix[0]) if matrix else 0
    infinite = float(columns)

    def recurse(
        row: int, used: set[int], chosen: list[int | None], running: list[float]
    ) -> None:
        nonlocal best_total, best_key, best
        if row == rows:
            total = math.fsum(running)
            key = tuple(infinite if c is None else float(c) for c in chosen)
            if total > best_total or (total == best_total and key < best_key):
                best_total = total
                best_key = key
                best = list(chosen)
            return
        for j in range(columns):
            if j in used or matrix[row][j] <= 0.0:
                continue
            recurse(
                row + 1, used | {j}, chosen + [j], running + [matrix[row][j]]
            )
        recurse(row + 1, used, chosen + [None], running)

    recurse(0, set(), [], [])
    return best


def brute_force_match(
    q: TaraGraph,
    m: TaraGraph,
    threshold: float = DEFAULT_THRESHOLD,
    similarity: SimilarityFn = node_similarity,
    enforce_guard: bool = True,
) -> Matching | None:
    """Exhaustive oracle with the same objective and tie-breaking.

    Guarded to small graphs; raises SizeGuardExceeded beyond 6 question
    or 8 manual nodes.  Test suites comparing against known graphs may
    switch the guard off explicitly.
    """
    if enforce_guard and len(q.nodes) > BRUTE_FORCE_MAX_QUESTION:
        raise SizeGuardExceeded(
            f"question graph has {len(q.nodes)} nodes, guard is "
            f"{BRUTE_FORCE_MAX_QUESTION}"
        )
    if enforce_guard and len(m.nodes) > BRUTE_FORCE_MAX_MANUAL:
        raise SizeGuardExceeded(
            f"manual graph has {len(m.nodes)} nodes, guard is "
            f"{BRUTE_FORCE_MAX_MANUAL}"
        )
    pairs = []
    for kind in (NodeKind.ACTION, NodeKind.ENTITY):
        pairs.extend(
            _pairs_for_kind(q, m, kind, threshold, similarity,
                            _exhaustive_assignment)
        )
    return _finish(q, m, pairs)
