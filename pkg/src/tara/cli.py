"""Command-line surface over the pipeline.

Subcommands: ``build-graph`` (manual parse -> graph files), ``answer``
(one question against one manual), ``eval`` (a system over a corpus),
``inspect`` (basic questions against a graph file).

Every flag can also be set through a ``TARA_``-prefixed environment
variable (e.g. ``TARA_THRESHOLD``) or a JSON config file passed with
``--config``; explicit flags win over environment values, which win over
the config file.  Stdout carries exclusively the declared payload format;
diagnostics and logging go to stderr.  Module errors map to exit code 2
with a stable ``Code: message`` line on stderr.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click
from click.core import ParameterSource

from .builder import DEFAULT_MERGE_THRESHOLD, StateVerbLexicon, build_manual
from .errors import QuestionParseUnavailable, TaraError
from .evaluation import (
    SYSTEM_NAMES,
    evaluate_basic,
    evaluate_faq,
    load_corpus,
    make_system,
)
from .graph import answer_basic, deserialize_graph, serialize_graph
from .inference import answer_question
from .matching import DEFAULT_THRESHOLD
from .sdp import document_from_dict, load_sdp_document

logger = logging.getLogger(__name__)

_CONTEXT = {"auto_envvar_prefix": "TARA", "help_option_names": ["-h", "--help"]}


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TaraError as exc:
            click.echo(f"{exc.code}: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _config_value(ctx: click.Context, param: str, value, key: str | None = None):
    """Apply config-file fallback: flags and env beat the config file."""
    config = ctx.obj or {}
    key = key or param
    if ctx.get_parameter_source(param) is ParameterSource.DEFAULT and key in config:
        return config[key]
    return value


def _load_lexicon(path: str | None) -> StateVerbLexicon | None:
    return StateVerbLexicon.from_file(path) if path else None


@click.group(context_settings=_CONTEXT)
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON config file; keys mirror the flag names.",
)
@click.pass_context
def main(ctx: click.Context, config: str | None) -> None:
    """Build step/fact graphs from parsed manuals and answer questions."""
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING)
    ctx.obj = {}
    if config:
        with open(config, encoding="utf-8") as handle:
            loaded = json.load(handle)
        if not isinstance(loaded, dict):
            raise click.UsageError("config file must hold a JSON object")
        ctx.obj = {key.replace("-", "_"): value for key, value in loaded.items()}


@main.command("build-graph")
@click.argument("manual", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(), help="Output graph file.")
@click.option("--merge-threshold", type=click.FloatRange(0.0, 1.0),
              default=DEFAULT_MERGE_THRESHOLD, show_default=True,
              envvar="TARA_MERGE_THRESHOLD")
@click.option("--lexicon", type=click.Path(exists=True, dir_okay=False), default=None,
              envvar="TARA_LEXICON",
              help="State-verb lexicon file, one phrase per line.")
@click.pass_context
@_handle_errors
def cmd_build_graph(
    ctx: click.Context, manual: str, out: str, merge_threshold: float,
    lexicon: str | None,
) -> None:
    """Build graph files from a parsed manual.

    Writes OUT for a single-task manual; a manual with several tasks
    writes OUT with .0, .1, ... inserted before the extension.  Exits 3
    when the manual yields no user action at all.
    """
    merge_threshold = _config_value(ctx, "merge_threshold", merge_threshold)
    lexicon = _config_value(ctx, "lexicon", lexicon)
    doc = load_sdp_document(manual)
    result = build_manual(
        doc, _load_lexicon(lexicon), merge_threshold=merge_threshold
    )
    for line in result.diagnostics:
        click.echo(line, err=True)
    if not result.graphs:
        sys.exit(3)
    out_path = Path(out)
    written = []
    if len(result.graphs) == 1:
        out_path.write_bytes(serialize_graph(result.graphs[0]))
        written.append(str(out_path))
    else:
        stem, suffix = out_path.name, ""
        if stem.endswith(".tara.json"):
            stem, suffix = stem[: -len(".tara.json")], ".tara.json"
        for index, graph in enumerate(result.graphs):
            target = out_path.with_name(f"{stem}.{index}{suffix}")
            target.write_bytes(serialize_graph(graph))
            written.append(str(target))
    click.echo(json.dumps({"written": written}, ensure_ascii=False))


def _resolve_question_doc(
    manual_path: Path, question: str | None, question_sdp: str | None,
    questions_file: str | None,
):
    if question_sdp:
        return load_sdp_document(question_sdp)
    if question is None:
        raise QuestionParseUnavailable("pass --question or --question-sdp")
    candidate = Path(question)
    if candidate.suffix == ".json" and candidate.is_file():
        return load_sdp_document(candidate)
    # raw text: look the parse up in the corpus question file
    lookup = (
        Path(questions_file)
        if questions_file
        else manual_path.parent.parent / "questions.jsonl"
    )
    if lookup.is_file():
        for line in lookup.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            if record.get("question") == question and "sdp" in record:
                return document_from_dict(record["sdp"])
    raise QuestionParseUnavailable(
        f"no parse found for question text {question!r}; provide --question-sdp "
        "or a questions.jsonl carrying the parsed question"
    )


@main.command("answer")
@click.argument("manual", type=click.Path(exists=True, dir_okay=False))
@click.option("--question", default=None, help="Question text or path to its parse.")
@click.option("--question-sdp", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Parsed question in the document wire format.")
@click.option("--questions", type=click.Path(exists=True, dir_okay=False),
              default=None, help="questions.jsonl to resolve raw question text.")
@click.option("--threshold", type=click.FloatRange(0.0, 1.0),
              default=DEFAULT_THRESHOLD, show_default=True, envvar="TARA_THRESHOLD")
@click.option("--merge-threshold", type=click.FloatRange(0.0, 1.0),
              default=DEFAULT_MERGE_THRESHOLD, show_default=True,
              envvar="TARA_MERGE_THRESHOLD")
@click.option("--lexicon", type=click.Path(exists=True, dir_okay=False), default=None,
              envvar="TARA_LEXICON")
@click.option("--format", "fmt", type=click.Choice(["json", "table"]),
              default="json", show_default=True, envvar="TARA_FORMAT")
@click.pass_context
@_handle_errors
def cmd_answer(
    ctx: click.Context, manual: str, question: str | None, question_sdp: str | None,
    questions: str | None, threshold: float, merge_threshold: float,
    lexicon: str | None, fmt: str,
) -> None:
    """Answer one question against one manual."""
    threshold = _config_value(ctx, "threshold", threshold)
    merge_threshold = _config_value(ctx, "merge_threshold", merge_threshold)
    lexicon = _config_value(ctx, "lexicon", lexicon)
    fmt = _config_value(ctx, "fmt", fmt, key="format")

    manual_path = Path(manual)
    doc = load_sdp_document(manual_path)
    state_verbs = _load_lexicon(lexicon)
    result = build_manual(doc, state_verbs, merge_threshold=merge_threshold)
    for line in result.diagnostics:
        click.echo(line, err=True)
    question_doc = _resolve_question_doc(manual_path, question, question_sdp, questions)
    answer = answer_question(
        question_doc,
        result.graphs,
        threshold=threshold,
        lexicon=state_verbs,
        merge_threshold=merge_threshold,
    )

    if fmt == "table":
        click.echo(f"status    {answer.status.value}")
        if answer.conflict:
            category = answer.conflict.category.value if answer.conflict.category else "-"
            click.echo(f"conflict  {answer.conflict.kind.value} ({category})")
        for item in answer.payload:
            sentences = ", ".join(str(i) for i in item.provenance)
            click.echo(f"answer    {item.phrase}  [sentences {sentences}]")
        if answer.diagnostic:
            click.echo(f"note      {answer.diagnostic}")
        return
    payload = {
        "question_id": answer.question_id,
        "status": answer.status.value,
        "conflict": (
            {
                "kind": answer.conflict.kind.value,
                "category": (
                    answer.conflict.category.value if answer.conflict.category else None
                ),
            }
            if answer.conflict
            else None
        ),
        "payload": [
            {"phrase": item.phrase, "sentences": list(item.provenance)}
            for item in answer.payload
        ],
        "ranked_sentences": answer.ranked_sentences(),
        "matched_graph_id": answer.matched_graph_id,
        "diagnostic": answer.diagnostic,
    }
    click.echo(json.dumps(payload, ensure_ascii=False, sort_keys=True))


@main.command("eval")
@click.argument("corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--system", type=click.Choice(list(SYSTEM_NAMES)), required=True)
@click.option("--jobs", type=click.IntRange(1, 64), default=1, show_default=True,
              envvar="TARA_JOBS",
              help="Concurrent question workers; reports are identical at any value.")
@click.option("--threshold", type=click.FloatRange(0.0, 1.0),
              default=DEFAULT_THRESHOLD, show_default=True, envvar="TARA_THRESHOLD")
@click.option("--merge-threshold", type=click.FloatRange(0.0, 1.0),
              default=DEFAULT_MERGE_THRESHOLD, show_default=True,
              envvar="TARA_MERGE_THRESHOLD")
@click.option("--lexicon", type=click.Path(exists=True, dir_okay=False), default=None,
              envvar="TARA_LEXICON")
@click.option("--averaging", type=click.Choice(["per-question", "pooled"]),
              default="per-question", show_default=True, envvar="TARA_AVERAGING")
@click.option("--format", "fmt", type=click.Choice(["json", "table"]),
              default="json", show_default=True, envvar="TARA_FORMAT")
@click.option("--out", type=click.Path(), default=None,
              help="Also write the JSON report to this path.")
@click.pass_context
@_handle_errors
def cmd_eval(
    ctx: click.Context, corpus: str, system: str, jobs: int, threshold: float,
    merge_threshold: float, lexicon: str | None, averaging: str, fmt: str,
    out: str | None,
) -> None:
    """Evaluate a system (hum, lexical, keyword) over a corpus directory."""
    threshold = _config_value(ctx, "threshold", threshold)
    merge_threshold = _config_value(ctx, "merge_threshold", merge_threshold)
    lexicon = _config_value(ctx, "lexicon", lexicon)
    averaging = _config_value(ctx, "averaging", averaging)
    fmt = _config_value(ctx, "fmt", fmt, key="format")

    loaded = load_corpus(corpus)
    state_verbs = _load_lexicon(lexicon)
    system_fn = make_system(
        system, loaded, threshold=threshold, lexicon=state_verbs,
        merge_threshold=merge_threshold,
    )
    report = evaluate_faq(
        system_fn, loaded, jobs=jobs, averaging=averaging, system_name=system
    )
    report.metadata["threshold"] = threshold
    report.metadata["merge_threshold"] = merge_threshold

    if loaded.gold_graphs and system == "hum":
        built = getattr(system_fn, "graphs", {})
        basic = evaluate_basic(built, loaded.gold_graphs, system_name=system)
        report.basic = basic.basic
        report.metadata.update(basic.metadata)
    elif not loaded.gold_graphs:
        click.echo("no gold graphs in corpus; basic-question scores skipped", err=True)

    rendered = report.to_json() if fmt == "json" else report.to_table()
    if out:
        Path(out).write_text(report.to_json(), encoding="utf-8")
    click.echo(rendered, nl=False)


@main.command("inspect")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.argument("question", type=click.Choice([f"B{i}" for i in range(1, 10)]))
@click.argument("context", nargs=-1)
@click.option("--format", "fmt", type=click.Choice(["json", "table"]),
              default="json", show_default=True, envvar="TARA_FORMAT")
@click.pass_context
@_handle_errors
def cmd_inspect(
    ctx: click.Context, graph: str, question: str, context: tuple[str, ...], fmt: str
) -> None:
    """Answer a basic question (B1-B9) against a graph file.

    B3/B4 need a node id, B5 an argument id, B6-B9 two element ids.
    """
    fmt = _config_value(ctx, "fmt", fmt, key="format")
    loaded = deserialize_graph(Path(graph))
    result = answer_basic(loaded, question, list(context))
    if fmt == "table":
        if isinstance(result, bool):
            click.echo("yes" if result else "no")
        else:
            for value in result:
                click.echo(value)
        return
    click.echo(json.dumps(result, ensure_ascii=False))


if __name__ == "__main__":
    main()
