import json

import pytest
from click.testing import CliRunner

from tara.cli import main
from tara.fixtures import corpus_dir, scratch_card_gold_graph, scratch_card_manual


@pytest.fixture()
def runner():
    return CliRunner()


MANUAL = str(scratch_card_manual())
CORPUS = str(corpus_dir())
GOLD = str(scratch_card_gold_graph())


class TestBuildGraph:
    def test_writes_graph_file(self, runner, tmp_path):
        out = tmp_path / "scratch.tara.json"
        result = runner.invoke(main, ["build-graph", MANUAL, "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output) == {"written": [str(out)]}
        graph = json.loads(out.read_text())
        assert graph["manual_id"] == "scratch_card"

    def test_cyclic_parse_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.sdp.json"
        bad.write_text(
            json.dumps(
                {
                    "manual_id": "bad",
                    "sentences": [
                        {
                            "index": 0,
                            "text": "loop",
                            "tokens": [
                                {"i": 1, "form": "a", "deps": [[2, "Agt"]]},
                                {"i": 2, "form": "b", "deps": [[1, "Pat"]]},
                            ],
                        }
                    ],
                }
            )
        )
        out = tmp_path / "out.json"
        result = runner.invoke(main, ["build-graph", str(bad), "--out", str(out)])
        assert result.exit_code == 2
        assert "CyclicDependency" in result.stderr
        assert not out.exists()

    def test_actionless_manual_exits_3(self, runner, tmp_path):
        doc = tmp_path / "facts.sdp.json"
        doc.write_text(
            json.dumps(
                {
                    "manual_id": "facts",
                    "sentences": [
                        {
                            "index": 0,
                            "text": "The system limits the promotion.",
                            "tokens": [
                                {"i": 1, "form": "system", "deps": [[2, "Agt"]]},
                                {"i": 2, "form": "limits", "deps": [[0, "Root"]]},
                                {"i": 3, "form": "promotion", "deps": [[2, "Pat"]]},
                            ],
                        }
                    ],
                }
            )
        )
        result = runner.invoke(
            main, ["build-graph", str(doc), "--out", str(tmp_path / "o.json")]
        )
        assert result.exit_code == 3
        assert "NoActionFound" in result.stderr


class TestAnswer:
    def test_question_text_resolved_from_corpus(self, runner):
        result = runner.invoke(
            main,
            ["answer", MANUAL, "--question", "Where can I scratch my scratch card?"],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["status"] == "Answered"
        assert payload["payload"] == [
            {"phrase": "on the payment page", "sentences": [3]}
        ]

    def test_unknown_question_text_exits_2(self, runner):
        result = runner.invoke(
            main, ["answer", MANUAL, "--question", "Is the moon made of cheese?"]
        )
        assert result.exit_code == 2
        assert "QuestionParseUnavailable" in result.stderr

    def test_question_sdp_file(self, runner, tmp_path):
        question = tmp_path / "q.sdp.json"
        question.write_text(
            json.dumps(
                {
                    "manual_id": "q",
                    "sentences": [
                        {
                            "index": 0,
                            "text": "I didn't get the scratch card.",
                            "tokens": [
                                {"i": 1, "form": "I", "deps": [[3, "Agt"]]},
                                {"i": 2, "form": "didn't", "deps": [[3, "mNEG"]]},
                                {"i": 3, "form": "get", "deps": [[0, "Root"]]},
                                {"i": 4, "form": "the", "deps": [[6, "mDEPD"]]},
                                {"i": 5, "form": "scratch", "deps": [[6, "mDEPD"]]},
                                {"i": 6, "form": "card", "deps": [[3, "Pat"]]},
                            ],
                        }
                    ],
                }
            )
        )
        result = runner.invoke(
            main, ["answer", MANUAL, "--question-sdp", str(question)]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["ranked_sentences"] == [2, 6, 7]

    def test_table_format(self, runner):
        result = runner.invoke(
            main,
            [
                "answer", MANUAL,
                "--question", "What is the hit rate of the scratch card?",
                "--format", "table",
            ],
        )
        assert result.exit_code == 0
        assert "100%" in result.output

    def test_stdout_is_pure_json(self, runner):
        result = runner.invoke(
            main,
            ["answer", MANUAL, "--question", "I didn't get the scratch card."],
        )
        json.loads(result.output)  # must parse as a single JSON document


class TestEval:
    def test_lexical_eval_writes_report(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(
            main,
            ["eval", CORPUS, "--system", "lexical", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        assert report["system"] == "lexical"
        assert set(report["faq"]) == {
            "factoid", "procedure", "inconsistent", "overall",
        }

    def test_hum_eval_includes_basic_scores(self, runner):
        result = runner.invoke(main, ["eval", CORPUS, "--system", "hum"])
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["basic"]["B6"]["f1"] == 1.0

    def test_jobs_produce_byte_identical_reports(self, runner, tmp_path):
        first = tmp_path / "jobs1.json"
        second = tmp_path / "jobs8.json"
        for out, jobs in ((first, "1"), (second, "8")):
            result = runner.invoke(
                main,
                ["eval", CORPUS, "--system", "hum", "--jobs", jobs, "--out", str(out)],
            )
            assert result.exit_code == 0, result.output
        assert first.read_bytes() == second.read_bytes()

    def test_table_format(self, runner):
        result = runner.invoke(
            main, ["eval", CORPUS, "--system", "keyword", "--format", "table"]
        )
        assert result.exit_code == 0
        assert "overall" in result.output


class TestInspect:
    def test_b1_lists_actions(self, runner):
        result = runner.invoke(main, ["inspect", GOLD, "B1"])
        assert result.exit_code == 0
        assert json.loads(result.output) == [
            "sign in", "scan", "pay", "get", "scratch",
        ]

    def test_b6_membership(self, runner):
        result = runner.invoke(main, ["inspect", GOLD, "B6", "n006", "n008"])
        assert result.exit_code == 0
        assert json.loads(result.output) is True

    def test_unknown_element_exits_2(self, runner):
        result = runner.invoke(main, ["inspect", GOLD, "B3", "n999"])
        assert result.exit_code == 2
        assert "UnknownElement" in result.stderr


class TestConfigPrecedence:
    def test_config_file_supplies_defaults(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"threshold": 0.99}))
        # threshold 0.99 rejects the near-match question entirely
        result = runner.invoke(
            main,
            [
                "--config", str(config),
                "answer", MANUAL,
                "--question", "Where can I scratch my scratch card?",
            ],
        )
        payload = json.loads(result.output)
        assert payload["status"] == "Answered"  # exact labels still match at 0.99

    def test_flag_overrides_config(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"format": "table"}))
        result = runner.invoke(
            main,
            [
                "--config", str(config),
                "answer", MANUAL,
                "--question", "What is the hit rate of the scratch card?",
                "--format", "json",
            ],
        )
        json.loads(result.output)

    def test_config_applies_when_flag_absent(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"format": "table"}))
        result = runner.invoke(
            main,
            [
                "--config", str(config),
                "answer", MANUAL,
                "--question", "What is the hit rate of the scratch card?",
            ],
        )
        with pytest.raises(json.JSONDecodeError):
            json.loads(result.output)

    def test_env_var_mirrors_flag(self, runner):
        result = runner.invoke(
            main,
            [
                "answer", MANUAL,
                "--question", "What is the hit rate of the scratch card?",
            ],
            env={"TARA_FORMAT": "table"},
        )
        assert result.exit_code == 0
        with pytest.raises(json.JSONDecodeError):
            json.loads(result.output)
