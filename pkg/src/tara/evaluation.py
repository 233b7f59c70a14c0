"""Corpus loading, answer metrics, and the evaluation harness.

Answer quality over sentence sets uses precision/recall/F1 plus the @1
variants computed on the top-ranked prediction only.  Graph quality (the
nine basic questions) uses BLEU-based P/R/F1 for the list-valued questions
B1-B5 and plain set P/R/F1 for the relation questions B6-B9; the BLEU-based
precision is the mean over predictions of the best sentence BLEU against
any gold item, recall the mirror image, which is recorded in the report
metadata so the numbers stay interpretable.

Corpus layout::

    corpus/
      manuals/<id>.sdp.json     # parsed manuals (wire format), or
      manuals/<id>.txt          # raw text, one sentence per line
      questions.jsonl           # {"manual_id", "question", "gold_sentences",
                                #  "type", "sdp"?}
      gold_graphs/<id>.tara.json   # optional gold graphs
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .baselines import KeywordContext, lexical_match, rank_by_keywords, tokenize
from .builder import StateVerbLexicon, build_manual
from .errors import MalformedCorpus, MalformedGraphFile, TaraError
from .graph import EdgeKind, NodeKind, TaraGraph, deserialize_graph
from .inference import answer_question
from .matching import DEFAULT_THRESHOLD
from .sdp import SdpDocument, document_from_dict, load_sdp_document

QUESTION_TYPES = ("factoid", "procedure", "inconsistent")

BASIC_QUESTIONS = tuple(f"B{i}" for i in range(1, 10))
#: Basic questions scored with BLEU-based metrics instead of exact sets.
BLEU_QUESTIONS = frozenset({"B1", "B2", "B3", "B4", "B5"})


# -- elementary metrics ----------------------------------------------------


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def span_prf(pred: set, gold: set) -> tuple[float, float, float]:
    """Set precision/recall/F1; empty prediction scores zero."""
    if not pred or not gold:
        return (0.0, 0.0, 0.0)
    overlap = len(pred & gold)
    precision = overlap / len(pred)
    recall = overlap / len(gold)
    return (precision, recall, _f1(precision, recall))


def at1_prf(ranked: Sequence[int], gold: set) -> tuple[float, float, float]:
    """span_prf restricted to the top-1 prediction."""
    if not ranked:
        return (0.0, 0.0, 0.0)
    return span_prf({ranked[0]}, gold)


def sentence_bleu(
    candidate: Sequence[str], reference: Sequence[str], max_order: int = 4
) -> float:
    """Sentence BLEU: clipped n-gram precision up to 4-grams with brevity
    penalty.  Zero counts at orders >= 2 get add-one smoothing; a zero
    unigram count means no overlap at all and scores 0, which keeps
    single-token comparisons exact."""
    if not candidate:
        return 0.0
    if not reference:
        return 0.0
    log_precisions = []
    for order in range(1, min(max_order, len(candidate)) + 1):
        cand_grams: dict[tuple[str, ...], int] = {}
        for i in range(len(candidate) - order + 1):
            gram = tuple(candidate[i : i + order])
            cand_grams[gram] = cand_grams.get(gram, 0) + 1
        ref_grams: dict[tuple[str, ...], int] = {}
        for i in range(len(reference) - order + 1):
            gram = tuple(reference[i : i + order])
            ref_grams[gram] = ref_grams.get(gram, 0) + 1
        clipped = sum(
            min(count, ref_grams.get(gram, 0)) for gram, count in cand_grams.items()
        )
        total = sum(cand_grams.values())
        if clipped == 0:
            if order == 1:
                return 0.0
            clipped, total = 1, total + 1
        log_precisions.append(math.log(clipped / total))
    if not log_precisions:
        return 0.0
    brevity = (
        1.0
        if len(candidate) >= len(reference)
        else math.exp(1 - len(reference) / len(candidate))
    )
    return brevity * math.exp(sum(log_precisions) / len(log_precisions))


def bleu_prf(
    pred: Sequence[str], gold: Sequence[str]
) -> tuple[float, float, float]:
    """BLEU-based precision/recall/F1 between two phrase lists.

    Precision aligns every prediction with its best gold phrase, recall
    every gold phrase with its best prediction; an empty side scores zero.
    """
    if not pred or not gold:
        return (0.0, 0.0, 0.0)
    pred_tokens = [tokenize(p) for p in pred]
    gold_tokens = [tokenize(g) for g in gold]
    precision = math.fsum(
        max(sentence_bleu(p, g) for g in gold_tokens) for p in pred_tokens
    ) / len(pred_tokens)
    recall = math.fsum(
        max(sentence_bleu(g, p) for p in pred_tokens) for g in gold_tokens
    ) / len(gold_tokens)
    return (precision, recall, _f1(precision, recall))


# -- corpus ----------------------------------------------------------------


@dataclass(frozen=True)
class Manual:
    manual_id: str
    sentences: tuple[str, ...]
    doc: SdpDocument | None = None

    @property
    def text(self) -> str:
        return " ".join(self.sentences)


@dataclass(frozen=True)
class QaRecord:
    manual_id: str
    question: str
    gold_sentences: tuple[int, ...]
    qtype: str
    sdp: SdpDocument | None = None


@dataclass
class Corpus:
    root: Path
    manuals: dict[str, Manual]
    records: list[QaRecord]
    gold_graphs: dict[str, list[TaraGraph]] = field(default_factory=dict)

    def manual_texts(self) -> list[str]:
        return [m.text for _, m in sorted(self.manuals.items())]


def load_corpus(path: str | Path) -> Corpus:
    """Load and validate a corpus directory.

    Raises MalformedCorpus with a file or line reference on any problem.
    """
    root = Path(path)
    manuals_dir = root / "manuals"
    if not manuals_dir.is_dir():
        raise MalformedCorpus(f"{root}: missing manuals/ directory")

    manuals: dict[str, Manual] = {}
    for file in sorted(manuals_dir.iterdir()):
        if file.name.endswith(".sdp.json"):
            manual_id = file.name[: -len(".sdp.json")]
            try:
                doc = load_sdp_document(file)
            except TaraError as exc:
                raise MalformedCorpus(f"{file}: {exc}") from exc
            if doc.manual_id != manual_id:
                raise MalformedCorpus(
                    f"{file}: manual_id {doc.manual_id!r} does not match filename"
                )
            sentences = tuple(s.text for s in doc.sentences)
            manuals[manual_id] = Manual(manual_id, sentences, doc)
        elif file.suffix == ".txt":
            manual_id = file.stem
            sentences = tuple(
                line.strip()
                for line in file.read_text(encoding="utf-8").splitlines()
                if line.strip()
            )
            manuals[manual_id] = Manual(manual_id, sentences)
    if not manuals:
        raise MalformedCorpus(f"{manuals_dir}: no manuals found")

    questions_file = root / "questions.jsonl"
    if not questions_file.is_file():
        raise MalformedCorpus(f"{root}: missing questions.jsonl")
    records = []
    for number, line in enumerate(
        questions_file.read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = line.strip()
        if not line:
            continue
        where = f"{questions_file}:{number}"
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedCorpus(f"{where}: invalid JSON: {exc}") from exc
        records.append(_parse_record(raw, manuals, where))

    gold_graphs: dict[str, list[TaraGraph]] = {}
    gold_dir = root / "gold_graphs"
    if gold_dir.is_dir():
        for file in sorted(gold_dir.glob("*.tara.json")):
            try:
                graph = deserialize_graph(file)
            except MalformedGraphFile as exc:
                raise MalformedCorpus(f"{file}: {exc}") from exc
            if graph.manual_id not in manuals:
                raise MalformedCorpus(
                    f"{file}: gold graph references unknown manual "
                    f"{graph.manual_id!r}"
                )
            gold_graphs.setdefault(graph.manual_id, []).append(graph)

    return Corpus(root=root, manuals=manuals, records=records, gold_graphs=gold_graphs)


def _parse_record(
    raw: object, manuals: Mapping[str, Manual], where: str
) -> QaRecord:
    if not isinstance(raw, dict):
        raise MalformedCorpus(f"{where}: record must be an object")
    manual_id = raw.get("manual_id")
    question = raw.get("question")
    gold = raw.get("gold_sentences")
    qtype = raw.get("type")
    if manual_id not in manuals:
        raise MalformedCorpus(f"{where}: unknown manual {manual_id!r}")
    if not isinstance(question, str) or not question:
        raise MalformedCorpus(f"{where}: question must be a non-empty string")
    if qtype not in QUESTION_TYPES:
        raise MalformedCorpus(f"{where}: type must be one of {QUESTION_TYPES}")
    if (
        not isinstance(gold, list)
        or not gold
        or not all(isinstance(i, int) for i in gold)
    ):
        raise MalformedCorpus(f"{where}: gold_sentences must be a non-empty int list")
    limit = len(manuals[manual_id].sentences)
    for index in gold:
        if index < 0 or index >= limit:
            raise MalformedCorpus(
                f"{where}: gold sentence {index} outside manual of {limit} sentences"
            )
    sdp = None
    if "sdp" in raw:
        try:
            sdp = document_from_dict(raw["sdp"])
        except TaraError as exc:
            raise MalformedCorpus(f"{where}: bad question parse: {exc}") from exc
    return QaRecord(
        manual_id=manual_id,
        question=question,
        gold_sentences=tuple(gold),
        qtype=qtype,
        sdp=sdp,
    )


# -- systems -----------------------------------------------------------------

SystemFn = Callable[[QaRecord, Manual], Sequence[int]]


class HumSystem:
    """Graph pipeline: build manual graphs once, answer via inference."""

    def __init__(
        self,
        corpus: Corpus,
        threshold: float = DEFAULT_THRESHOLD,
        lexicon: StateVerbLexicon | None = None,
        merge_threshold: float | None = None,
    ) -> None:
        self.threshold = threshold
        self.lexicon = lexicon
        self.merge_threshold = merge_threshold
        self.graphs: dict[str, list[TaraGraph]] = {}
        self.diagnostics: list[str] = []
        for manual_id, manual in sorted(corpus.manuals.items()):
            if manual.doc is None:
                continue
            kwargs = {}
            if merge_threshold is not None:
                kwargs["merge_threshold"] = merge_threshold
            result = build_manual(manual.doc, lexicon, **kwargs)
            self.graphs[manual_id] = result.graphs
            self.diagnostics.extend(result.diagnostics)

    def __call__(self, record: QaRecord, manual: Manual) -> Sequence[int]:
        graphs = self.graphs.get(record.manual_id, [])
        if record.sdp is None or not graphs:
            return []
        answer = answer_question(
            record.sdp,
            graphs,
            threshold=self.threshold,
            lexicon=self.lexicon,
            merge_threshold=self.merge_threshold,
        )
        return answer.ranked_sentences()


class LexicalSystem:
    def __call__(self, record: QaRecord, manual: Manual) -> Sequence[int]:
        return [index for index, _ in lexical_match(record.question, manual.sentences)]


class KeywordSystem:
    """Keyword-formula ranking; returns the top two sentences."""

    def __init__(self, corpus: Corpus) -> None:
        self.corpus_texts = corpus.manual_texts()

    def __call__(self, record: QaRecord, manual: Manual) -> Sequence[int]:
        ctx = KeywordContext.build(
            self.corpus_texts,
            manual.text,
            record.question,
            parse=manual.doc,
        )
        ranked = rank_by_keywords(record.question, manual.sentences, ctx)
        return [index for index, _ in ranked[:2]]


SYSTEM_NAMES = ("hum", "lexical", "keyword")


def make_system(
    name: str,
    corpus: Corpus,
    threshold: float = DEFAULT_THRESHOLD,
    lexicon: StateVerbLexicon | None = None,
    merge_threshold: float | None = None,
) -> SystemFn:
    if name == "hum":
        return HumSystem(corpus, threshold, lexicon, merge_threshold)
    if name == "lexical":
        return LexicalSystem()
    if name == "keyword":
        return KeywordSystem(corpus)
    raise ValueError(f"unknown system {name!r}; expected one of {SYSTEM_NAMES}")


# -- reports -----------------------------------------------------------------


@dataclass
class EvalReport:
    system: str
    averaging: str = "per-question"
    metadata: dict = field(default_factory=dict)
    #: type name -> {"count": int, "p": .., "r": .., "f1": .., "p@1": ..,
    #: "r@1": .., "f1@1": ..}
    faq: dict[str, dict] = field(default_factory=dict)
    per_question: list[dict] = field(default_factory=list)
    #: basic question id -> {"p": .., "r": .., "f1": ..}
    basic: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "averaging": self.averaging,
            "metadata": self.metadata,
            "faq": self.faq,
            "per_question": self.per_question,
            "basic": self.basic,
        }

    def to_json(self) -> str:
        return json.dumps(
            self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2
        ) + "\n"

    def to_table(self) -> str:
        lines = [f"system: {self.system}    averaging: {self.averaging}"]
        if self.faq:
            header = f"{'type':<14}{'n':>4}{'P':>8}{'R':>8}{'F1':>8}{'P@1':>8}{'R@1':>8}{'F1@1':>8}"
            lines += ["", header, "-" * len(header)]
            for name in (*QUESTION_TYPES, "overall"):
                row = self.faq.get(name)
                if row is None:
                    continue
                lines.append(
                    f"{name:<14}{row['count']:>4}"
                    f"{row['p']:>8.3f}{row['r']:>8.3f}{row['f1']:>8.3f}"
                    f"{row['p@1']:>8.3f}{row['r@1']:>8.3f}{row['f1@1']:>8.3f}"
                )
        if self.basic:
            header = f"{'question':<10}{'P':>8}{'R':>8}{'F1':>8}"
            lines += ["", header, "-" * len(header)]
            for name in (*BASIC_QUESTIONS, "average"):
                row = self.basic.get(name)
                if row is None:
                    continue
                lines.append(
                    f"{name:<10}{row['p']:>8.3f}{row['r']:>8.3f}{row['f1']:>8.3f}"
                )
        return "\n".join(lines) + "\n"


def _aggregate(rows: list[dict], averaging: str) -> dict:
    if not rows:
        return {
            "count": 0,
            "p": 0.0, "r": 0.0, "f1": 0.0,
            "p@1": 0.0, "r@1": 0.0, "f1@1": 0.0,
        }
    if averaging == "pooled":
        overlap = sum(row["_overlap"] for row in rows)
        pred = sum(row["_pred"] for row in rows)
        gold = sum(row["_gold"] for row in rows)
        overlap1 = sum(row["_overlap@1"] for row in rows)
        pred1 = sum(row["_pred@1"] for row in rows)
        p = overlap / pred if pred else 0.0
        r = overlap / gold if gold else 0.0
        p1 = overlap1 / pred1 if pred1 else 0.0
        r1 = overlap1 / gold if gold else 0.0
        return {
            "count": len(rows),
            "p": p, "r": r, "f1": _f1(p, r),
            "p@1": p1, "r@1": r1, "f1@1": _f1(p1, r1),
        }
    count = len(rows)
    result = {"count": count}
    for key in ("p", "r", "f1", "p@1", "r@1", "f1@1"):
        result[key] = math.fsum(row[key] for row in rows) / count
    return result


def evaluate_faq(
    system: SystemFn,
    corpus: Corpus,
    jobs: int = 1,
    averaging: str = "per-question",
    system_name: str = "system",
) -> EvalReport:
    """Run a system over every question and aggregate per type.

    Systems return ranked sentence-index lists; the top entry feeds the
    @1 metrics.  Evaluation order is fixed by the corpus, so reports are
    byte-identical for any jobs count.
    """
    if averaging not in ("per-question", "pooled"):
        raise ValueError("averaging must be 'per-question' or 'pooled'")

    def run(record: QaRecord) -> list[int]:
        return list(system(record, corpus.manuals[record.manual_id]))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            predictions = list(pool.map(run, corpus.records))
    else:
        predictions = [run(record) for record in corpus.records]

    rows = []
    for record, ranked in zip(corpus.records, predictions):
        deduped = list(dict.fromkeys(ranked))
        gold = set(record.gold_sentences)
        p, r, f1 = span_prf(set(deduped), gold)
        p1, r1, f11 = at1_prf(deduped, gold)
        top1 = {deduped[0]} if deduped else set()
        rows.append(
            {
                "manual_id": record.manual_id,
                "question": record.question,
                "type": record.qtype,
                "predicted": deduped,
                "p": p, "r": r, "f1": f1,
                "p@1": p1, "r@1": r1, "f1@1": f11,
                "_overlap": len(set(deduped) & gold),
                "_pred": len(deduped),
                "_gold": len(gold),
                "_overlap@1": len(top1 & gold),
                "_pred@1": len(top1),
            }
        )

    report = EvalReport(system=system_name, averaging=averaging)
    for qtype in QUESTION_TYPES:
        report.faq[qtype] = _aggregate(
            [row for row in rows if row["type"] == qtype], averaging
        )
    report.faq["overall"] = _aggregate(rows, averaging)
    report.per_question = [
        {k: v for k, v in row.items() if not k.startswith("_")} for row in rows
    ]
    return report


# -- basic-question evaluation ------------------------------------------------


def _basic_answers(graphs: Sequence[TaraGraph]) -> dict[str, object]:
    """Pooled basic-question views over all graphs of one manual."""
    actions: list[str] = []
    entities: list[str] = []
    action_args: list[str] = []
    entity_args: list[str] = []
    arg_args: list[str] = []
    next_pairs: set[tuple[str, str]] = set()
    pat_pairs: set[tuple[str, str]] = set()
    sub_pairs: set[tuple[str, str]] = set()
    pata_pairs: set[tuple[str, str]] = set()
    for graph in graphs:
        actions.extend(n.label for n in graph.actions())
        entities.extend(n.label for n in graph.entities())
        for argument in sorted(graph.arguments.values(), key=lambda a: a.id):
            owner_node = graph.nodes.get(argument.owner)
            if owner_node is not None:
                if owner_node.kind is NodeKind.ACTION:
                    action_args.append(argument.value)
                else:
                    entity_args.append(argument.value)
            else:
                arg_args.append(argument.value)
        for edge in graph.edges:
            if edge.kind is EdgeKind.NEXT:
                next_pairs.add((graph.nodes[edge.src].label, graph.nodes[edge.dst].label))
            elif edge.kind is EdgeKind.PAT:
                pat_pairs.add((graph.nodes[edge.src].label, graph.nodes[edge.dst].label))
            elif edge.kind is EdgeKind.SUB:
                sub_pairs.add((graph.nodes[edge.src].label, graph.nodes[edge.dst].label))
            elif edge.kind is EdgeKind.PATA:
                pata_pairs.add(
                    (graph.arguments[edge.src].value, graph.nodes[edge.dst].label)
                )
    return {
        "B1": sorted(actions),
        "B2": sorted(entities),
        "B3": sorted(action_args),
        "B4": sorted(entity_args),
        "B5": sorted(arg_args),
        "B6": next_pairs,
        "B7": pat_pairs,
        "B8": sub_pairs,
        "B9": pata_pairs,
    }


def evaluate_basic(
    built: Mapping[str, Sequence[TaraGraph]],
    gold: Mapping[str, Sequence[TaraGraph]],
    system_name: str = "hum",
) -> EvalReport:
    """Score built graphs against gold graphs on the nine basic questions.

    Manuals are compared on the union of their graphs; scores average over
    manuals that have gold annotation.
    """
    per_question: dict[str, list[tuple[float, float, float]]] = {
        q: [] for q in BASIC_QUESTIONS
    }
    for manual_id in sorted(gold):
        gold_views = _basic_answers(gold[manual_id])
        built_views = _basic_answers(built.get(manual_id, ()))
        for question in BASIC_QUESTIONS:
            predicted, expected = built_views[question], gold_views[question]
            if not predicted and not expected:
                triple = (1.0, 1.0, 1.0)  # nothing to find, nothing found
            elif question in BLEU_QUESTIONS:
                triple = bleu_prf(predicted, expected)
            else:
                triple = span_prf(set(predicted), set(expected))
            per_question[question].append(triple)

    report = EvalReport(
        system=system_name,
        metadata={
            "bleu": "per-item max alignment, 4-gram, add-one smoothing, "
                    "brevity penalty"
        },
    )
    triples = []
    for question in BASIC_QUESTIONS:
        values = per_question[question]
        if values:
            p = math.fsum(v[0] for v in values) / len(values)
            r = math.fsum(v[1] for v in values) / len(values)
            f1 = math.fsum(v[2] for v in values) / len(values)
        else:
            p = r = f1 = 0.0
        report.basic[question] = {"p": p, "r": r, "f1": f1}
        triples.append((p, r, f1))
    if triples:
        report.basic["average"] = {
            "p": math.fsum(t[0] for t in triples) / len(triples),
            "r": math.fsum(t[1] for t in triples) / len(triples),
            "f1": math.fsum(t[2] for t in triples) / len(triples),
        }
    return report
