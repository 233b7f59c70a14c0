"""Walk through graph construction for the bundled scratch-card manual.

The manual arrives as a semantic-dependency parse (one JSON file per
manual).  The pipeline inserts imperative subjects, collapses parse
offspring into phrases, extracts predicate frames, and assembles the
heterogeneous graph: user actions chained with NEXT, entities hanging off
their actions, and facts stored as ATT/STATE arguments.
"""

from tara.builder import build_manual
from tara.fixtures import scratch_card_manual
from tara.graph import validate
from tara.preprocess import extract_frames
from tara.sdp import load_sdp_document

doc = load_sdp_document(scratch_card_manual())
print(f"manual {doc.manual_id!r}, {len(doc.sentences)} sentences")
for sentence in doc.sentences:
    print(f"  [{sentence.index}] {sentence.text}")

print("\npredicate frames after normalization:")
for frame in extract_frames(doc):
    slots = ", ".join(f"{s.category.value}={s.value!r}" for s in frame.slots)
    print(
        f"  s{frame.sentence_index} {frame.predicate!r}"
        f" agent={frame.agent!r} patient={frame.patient!r}"
        + (f" [{slots}]" if slots else "")
    )

result = build_manual(doc)
graph = result.graphs[0]
print(f"\nbuilt {len(result.graphs)} graph(s); id {graph.graph_id}")

print("\nnodes:")
for node in sorted(graph.nodes.values(), key=lambda n: n.id):
    flag = " (user)" if node.is_user else ""
    print(f"  {node.id} {node.kind.value:<7} {node.label!r}{flag}"
          f" from sentences {list(node.provenance)}")

print("\narguments:")
for argument in sorted(graph.arguments.values(), key=lambda a: a.id):
    print(f"  {argument.id} on {argument.owner}: "
          f"{argument.category.value}={argument.value!r}")

print("\nedges:")
for edge in graph.edges:
    print(f"  {edge.kind.value:<5} {edge.src} -> {edge.dst}")

report = validate(graph)
print(f"\nvalidation: {'clean' if report.ok else report.violations}")
