import pytest

from tara.builder import build_manual
from tara.evaluation import load_corpus
from tara.fixtures import corpus_dir, scratch_card_gold_graph, scratch_card_manual
from tara.graph import deserialize_graph
from tara.sdp import load_sdp_document


@pytest.fixture(scope="session")
def fixture_corpus_dir():
    return corpus_dir()


@pytest.fixture(scope="session")
def scratch_doc():
    return load_sdp_document(scratch_card_manual())


@pytest.fixture(scope="session")
def scratch_graph(scratch_doc):
    result = build_manual(scratch_doc)
    assert len(result.graphs) == 1
    return result.graphs[0]


@pytest.fixture(scope="session")
def gold_graph():
    return deserialize_graph(scratch_card_gold_graph())


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(corpus_dir())


@pytest.fixture(scope="session")
def question_docs(corpus):
    return {record.question: record.sdp for record in corpus.records if record.sdp}
