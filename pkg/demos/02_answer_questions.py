"""Answer the three worked-example questions against the scratch-card manual.

Each question is itself parsed and represented as a small graph, matched
into the manual graph, and answered from the conflict between the two:

* a fact question conflicts on an argument value, so the manual-side
  value is the answer;
* a "where" question conflicts on a missing location, filled by walking
  NEXT edges back to the nearest step that has one;
* a negated statement surfaces the previous step and every constraint
  fact around the matched nodes.
"""

import json

from tara.builder import build_manual
from tara.fixtures import corpus_dir, scratch_card_manual
from tara.inference import answer_question
from tara.sdp import document_from_dict, load_sdp_document

graphs = build_manual(load_sdp_document(scratch_card_manual())).graphs
manual_sentences = load_sdp_document(scratch_card_manual()).sentences

records = [
    json.loads(line)
    for line in (corpus_dir() / "questions.jsonl").read_text().splitlines()
    if line.strip()
]

for record in records:
    if record["manual_id"] != "scratch_card":
        continue
    question = document_from_dict(record["sdp"])
    answer = answer_question(question, graphs)
    print(f"Q: {record['question']}")
    print(f"   type: {record['type']}, status: {answer.status.value}")
    if answer.conflict:
        category = answer.conflict.category.value if answer.conflict.category else "-"
        print(f"   conflict: {answer.conflict.kind.value} on {category}")
    for item in answer.payload:
        for index in item.provenance:
            print(f"   -> {item.phrase!r}  (sentence {index}: "
                  f"{manual_sentences[index].text})")
    print()
