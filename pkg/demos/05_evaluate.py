"""Run the full evaluation harness over the bundled corpus.

Answer quality is scored as sentence-set precision/recall/F1 with @1
variants; graph quality is scored against the gold graph through the nine
basic questions (BLEU-based for the list questions, set-based for the
relation questions).
"""

from tara.evaluation import evaluate_basic, evaluate_faq, load_corpus, make_system
from tara.fixtures import corpus_dir

corpus = load_corpus(corpus_dir())

for name in ("hum", "lexical", "keyword"):
    system = make_system(name, corpus)
    report = evaluate_faq(system, corpus, system_name=name)
    print(report.to_table())

hum = make_system("hum", corpus)
basic = evaluate_basic(hum.graphs, corpus.gold_graphs)
print(basic.to_table())
