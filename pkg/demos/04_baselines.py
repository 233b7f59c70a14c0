"""The two classical baselines on the bundled corpus.

Lexical matching scores whole sentences with the same edit-distance
similarity the matcher uses.  Keyword matching extracts TF-IDF keywords
per manual and combines overlap counts with a parse-subtree bonus and a
distance penalty.
"""

from tara.baselines import (
    KeywordContext,
    keyword_score_from_counts,
    lexical_match,
    rank_by_keywords,
    tfidf_keywords,
)
from tara.evaluation import load_corpus
from tara.fixtures import corpus_dir

corpus = load_corpus(corpus_dir())
manual = corpus.manuals["scratch_card"]
question = "What is the hit rate of the scratch card?"

print("lexical matching:")
for index, score in lexical_match(question, manual.sentences):
    print(f"  [{index}] {score:.3f}  {manual.sentences[index]}")

print("\nmanual keywords (TF-IDF):")
keywords = tfidf_keywords(corpus.manual_texts(), manual.text)
print(f"  {keywords}")

ctx = KeywordContext.build(
    corpus.manual_texts(), manual.text, question, parse=manual.doc
)
print(f"question keywords: {list(ctx.question_keywords)}")

print("\nkeyword ranking:")
for index, score in rank_by_keywords(question, manual.sentences, ctx)[:3]:
    print(f"  [{index}] {score:7.2f}  {manual.sentences[index]}")

print("\nscore formula sample: counts (2,1,1,1), farthest distance 4 ->",
      keyword_score_from_counts(2, 1, 1, 1, 4))
