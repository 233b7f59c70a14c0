"""Acceptance suite: one test per release criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``) and
pins the tolerances stated for the criterion.  Run with::

    pytest tests/test_acceptance.py -v -s
"""

import json
import math
import random
import string
import time
from contextlib import contextmanager

import pytest
from click.testing import CliRunner

from tara.builder import build, build_manual, build_question_graph
from tara.cli import main as cli_main
from tara.evaluation import evaluate_basic, sentence_bleu, span_prf, at1_prf
from tara.fixtures import corpus_dir, scratch_card_gold_graph, scratch_card_manual
from tara.graph import EdgeKind, TaraGraph, deserialize_graph, validate
from tara.inference import AnswerStatus, answer_question
from tara.matching import (
    brute_force_match,
    levenshtein,
    match_subgraph,
    node_similarity,
)
from tara.baselines import keyword_score_from_counts
from tara.sdp import load_sdp_document

from _generators import random_frames, random_graph
from test_evaluation import reference_bleu
from test_matching import reference_levenshtein


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"FAIL  {name}")
        raise
    print(f"PASS  {name}")


def test_worked_example_fidelity(corpus, question_docs):
    with criterion("worked-example fidelity (Q1/Q2/Q3, < 1 s)"):
        started = time.perf_counter()
        doc = load_sdp_document(scratch_card_manual())
        graphs = build_manual(doc).graphs

        q1 = answer_question(
            question_docs["What is the hit rate of the scratch card?"], graphs
        )
        q2 = answer_question(
            question_docs["Where can I scratch my scratch card?"], graphs
        )
        q3 = answer_question(
            question_docs["I didn't get the scratch card."], graphs
        )
        elapsed = time.perf_counter() - started

        # Q1: the stated value of the asked-for fact, from the fact sentence
        assert q1.status is AnswerStatus.ANSWERED
        assert [(i.phrase, i.provenance) for i in q1.payload] == [("100%", (5,))]

        # Q2: location filled from the nearest preceding step that has one
        assert q2.status is AnswerStatus.ANSWERED
        assert [(i.phrase, i.provenance) for i in q2.payload] == [
            ("on the payment page", (3,))
        ]

        # Q3: the previous step plus both constraint facts
        assert q3.status is AnswerStatus.ANSWERED
        assert q3.ranked_sentences() == [2, 6, 7]
        assert [i.phrase for i in q3.payload] == ["pay", "have", "limit"]

        assert elapsed < 1.0, f"pipeline took {elapsed:.3f}s"


def test_graph_validity_under_randomized_frames():
    with criterion("graph-validity suite (100 randomized frame lists)"):
        rng = random.Random(8811)
        for attempt in range(100):
            frames = random_frames(rng)
            result = build(frames, manual_id=f"stress-{attempt}")
            for graph in result.graphs:
                report = validate(graph)
                assert report.ok, (attempt, report.violations)


def test_matcher_agrees_with_brute_force_oracle(corpus, question_docs):
    with criterion("matcher oracle (>=500 random pairs + fixtures)"):
        rng = random.Random(4242)
        compared = 0
        while compared < 500:
            question = random_graph(rng, "q", max_actions=2, max_entities=3)
            manual = random_graph(rng, "m", max_actions=3, max_entities=4)
            assert len(question.nodes) <= 6 and len(manual.nodes) <= 8
            fast = match_subgraph(question, manual)
            exact = brute_force_match(question, manual)
            if fast is None or exact is None:
                assert fast is None and exact is None
                continue
            compared += 1
            assert fast.aggregate >= 0.99 * exact.aggregate - 1e-9
            assert abs(fast.aggregate - exact.aggregate) <= 1e-9
            assert fast.pairs == exact.pairs

        # bundled fixtures: exact equality, including the full manual graph
        manual_graphs = []
        for manual in corpus.manuals.values():
            if manual.doc is not None:
                manual_graphs.extend(build_manual(manual.doc).graphs)
        for doc in question_docs.values():
            question = build_question_graph(doc)
            for manual_graph in manual_graphs:
                fast = match_subgraph(question, manual_graph)
                exact = brute_force_match(
                    question, manual_graph, enforce_guard=False
                )
                if fast is None:
                    assert exact is None
                    continue
                assert fast.aggregate == exact.aggregate
                assert fast.pairs == exact.pairs


def test_similarity_properties_and_levenshtein_oracle():
    with criterion("similarity properties (10,000 random string pairs)"):
        rng = random.Random(314159)
        alphabet = string.ascii_letters + string.digits + " %-'" + "犬猫鳥"
        for _ in range(10_000):
            x = "".join(rng.choices(alphabet, k=rng.randint(0, 12)))
            y = "".join(rng.choices(alphabet, k=rng.randint(0, 12)))
            score = node_similarity(x, y)
            assert 0.0 <= score <= 1.0
            assert score == node_similarity(y, x)
            assert node_similarity(x, x) == 1.0
            assert levenshtein(x, y) == reference_levenshtein(x, y)


def test_metric_arithmetic():
    with criterion("metric arithmetic (hand triples + BLEU reference)"):
        assert span_prf({2, 3}, {3, 4}) == pytest.approx((0.5, 0.5, 0.5))
        assert span_prf({1}, {1}) == (1.0, 1.0, 1.0)
        assert span_prf(set(), {1}) == (0.0, 0.0, 0.0)
        assert at1_prf([3, 9], {3, 4}) == pytest.approx((1.0, 0.5, 2 / 3))
        assert at1_prf([], {1}) == (0.0, 0.0, 0.0)
        assert at1_prf([5], {5}) == (1.0, 1.0, 1.0)

        rng = random.Random(271828)
        vocabulary = ["sign", "in", "the", "app", "scan", "qr", "code", "pay"]
        for _ in range(50):
            candidate = [rng.choice(vocabulary) for _ in range(rng.randint(0, 9))]
            reference = [rng.choice(vocabulary) for _ in range(rng.randint(0, 9))]
            ours = sentence_bleu(candidate, reference)
            theirs = reference_bleu(candidate, reference)
            assert abs(ours - theirs) <= 1e-6


def test_baseline_formula():
    with criterion("keyword formula (exact cases + 1,000 monotone checks)"):
        assert keyword_score_from_counts(2, 1, 1, 1, 4) == 72.0
        assert keyword_score_from_counts(0, 0, 0, 0, 9) == -12.0

        rng = random.Random(1618)
        for _ in range(1_000):
            counts = [rng.randint(0, 12) for _ in range(4)]
            distance = rng.randint(0, 300)
            base = keyword_score_from_counts(*counts, distance)
            bumped = rng.randrange(4)
            raised = list(counts)
            raised[bumped] += 1
            assert keyword_score_from_counts(*raised, distance) > base
            assert keyword_score_from_counts(*counts, distance + 1) < base


def test_basic_question_round_trip():
    with criterion("B-answering round trip (F1 = 1.0, NEXT corruption)"):
        doc = load_sdp_document(scratch_card_manual())
        built = build_manual(doc).graphs
        gold = deserialize_graph(scratch_card_gold_graph())

        report = evaluate_basic({"scratch_card": built}, {"scratch_card": [gold]})
        for question, row in report.basic.items():
            assert row["f1"] == 1.0, (question, row)

        # removing one NEXT edge must hurt B6 and nothing else
        pruned_edges = tuple(gold.edges)
        victim = next(e for e in pruned_edges if e.kind is EdgeKind.NEXT)
        corrupted = TaraGraph(
            graph_id=gold.graph_id,
            manual_id=gold.manual_id,
            nodes=dict(gold.nodes),
            arguments=dict(gold.arguments),
            edges=tuple(e for e in pruned_edges if e != victim),
        )
        report = evaluate_basic(
            {"scratch_card": [corrupted]}, {"scratch_card": [gold]}
        )
        assert report.basic["B6"]["f1"] < 1.0
        for question in ("B1", "B2", "B3", "B4", "B5", "B7", "B8", "B9", "average"):
            if question == "average":
                continue
            assert report.basic[question]["f1"] == 1.0, question


def test_evaluation_determinism(tmp_path):
    with criterion("determinism (eval reports byte-identical across --jobs)"):
        runner = CliRunner()
        outputs = []
        for jobs in ("1", "8"):
            out = tmp_path / f"report-jobs{jobs}.json"
            result = runner.invoke(
                cli_main,
                [
                    "eval", str(corpus_dir()),
                    "--system", "hum",
                    "--jobs", jobs,
                    "--out", str(out),
                ],
            )
            assert result.exit_code == 0, result.output
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
