"""Node similarity and subgraph matching, including the exhaustive oracle.

Similarity is edit-distance based: S(x, y) = 1 - D(x, y) / max(|x|, |y|).
Matching solves an assignment problem per node kind and keeps pairs above
a threshold; the brute-force oracle enumerates every injective mapping
and must agree with the assignment solver.
"""

import random

from tara.builder import build_manual, build_question_graph
from tara.fixtures import corpus_dir, scratch_card_manual
from tara.matching import (
    brute_force_match,
    levenshtein,
    match_subgraph,
    node_similarity,
)
from tara.sdp import document_from_dict, load_sdp_document

print("similarity scores:")
for x, y in [("pay", "pay"), ("scratch card", "card"), ("card", "cart"),
             ("kitten", "sitting")]:
    print(f"  D({x!r}, {y!r}) = {levenshtein(x, y)}"
          f"  S = {node_similarity(x, y):.4f}")

manual = build_manual(load_sdp_document(scratch_card_manual())).graphs[0]

import json
q2_record = next(
    json.loads(line)
    for line in (corpus_dir() / "questions.jsonl").read_text().splitlines()
    if line.strip() and "scratch my scratch card" in line
)
question = build_question_graph(document_from_dict(q2_record["sdp"]))

print(f"\nquestion graph nodes: "
      f"{[(n.kind.value, n.label) for n in question.nodes.values() if not n.is_user]}")
matching = match_subgraph(question, manual)
print("matched pairs:")
for pair in matching.pairs:
    print(f"  {question.nodes[pair.question_node].label!r}"
          f" <-> {manual.nodes[pair.manual_node].label!r}"
          f"  (score {pair.score:.3f})")
print(f"aggregate similarity: {matching.aggregate:.3f}")

exact = brute_force_match(question, manual, enforce_guard=False)
print(f"oracle agreement: {matching.pairs == exact.pairs}")
