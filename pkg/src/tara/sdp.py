"""Wire format for semantic-dependency-parsed documents.

A document is a list of sentences; each sentence is a list of tokens with
one or more labelled heads (semantic dependency graphs are DAGs, not
trees).  Tags come from a closed vocabulary; a document may extend it by
mapping extra tags onto one of the argument categories.

JSON layout (UTF-8, one document per file)::

    {"manual_id": str,
     "space_delimited": bool,            # optional, default true
     "tag_extensions": {"TAG": "MOD"},   # optional
     "sentences": [{"index": int, "text": str,
                    "tokens": [{"i": int, "form": str,
                                "deps": [[head, "TAG"], ...]}]}]}

Head 0 denotes the virtual root.  A corpus is a directory of such files or
a JSON-lines stream of documents.
"""

from __future__ import annotations

import enum
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import CyclicDependency, MalformedInput, UnknownTag


class ArgCategory(enum.Enum):
    """Argument families attached to graph elements."""

    MOD = "MOD"
    TIME = "TIME"
    LOC = "LOC"
    MANN = "MANN"
    FN = "FN"
    ATT = "ATT"
    STATE = "STATE"


#: Categories that may sit on an Action node (and on STATE children).
ACTION_ARG_CATEGORIES = frozenset(
    {ArgCategory.MOD, ArgCategory.TIME, ArgCategory.LOC, ArgCategory.MANN}
)
#: Categories that may sit on an Entity node (and on ATT children).
ENTITY_ARG_CATEGORIES = frozenset(
    {ArgCategory.FN, ArgCategory.ATT, ArgCategory.STATE}
)

_TAG_ALIGNMENT: dict[str, ArgCategory | None] = {
    # modifier tags
    "mDEPD": ArgCategory.MOD,
    "mTime": ArgCategory.MOD,
    "mRang": ArgCategory.MOD,
    "mDegr": ArgCategory.MOD,
    "mFreq": ArgCategory.MOD,
    "mDir": ArgCategory.MOD,
    "mNEG": ArgCategory.MOD,
    "mMod": ArgCategory.MOD,
    # time tags
    "Time": ArgCategory.TIME,
    "Tini": ArgCategory.TIME,
    "Tfin": ArgCategory.TIME,
    "Tdur": ArgCategory.TIME,
    "Trang": ArgCategory.TIME,
    # location tags
    "Loc": ArgCategory.LOC,
    "Lini": ArgCategory.LOC,
    "Lfin": ArgCategory.LOC,
    "Lthru": ArgCategory.LOC,
    "Dir": ArgCategory.LOC,
    # manner tags
    "Mann": ArgCategory.MANN,
    "Tool": ArgCategory.MANN,
    "Matl": ArgCategory.MANN,
    "Accd": ArgCategory.MANN,
    # footnote tags
    "LINK": ArgCategory.FN,
    "Clas": ArgCategory.FN,
    # role tags carry no argument category
    "Agt": None,
    "Pat": None,
    "Root": None,
}

#: The closed tag vocabulary accepted without an extension mapping.
BASE_VOCABULARY = frozenset(_TAG_ALIGNMENT)

#: Tag used by the negation modifier; its argument value is normalized.
NEGATION_TAG = "mNEG"


def map_tag_to_arg(tag: str) -> ArgCategory | None:
    """Return the argument category a vocabulary tag aligns to.

    Role tags (Agt, Pat, Root) return None: they select node roles instead
    of producing arguments.  Raises UnknownTag outside the vocabulary.
    """
    try:
        return _TAG_ALIGNMENT[tag]
    except KeyError:
        raise UnknownTag(f"tag {tag!r} is not in the vocabulary") from None


@dataclass(frozen=True)
class SdpToken:
    """One token with its multi-head dependency list.

    ``span`` records the original 1-based indices this token's surface was
    collapsed from; a freshly parsed token spans only itself.  Synthetic
    tokens (the inserted imperative subject) are flagged so invariants can
    exempt them.
    """

    index: int
    surface: str
    dependencies: tuple[tuple[int, str], ...]
    span: tuple[int, ...] = ()
    synthetic: bool = False

    def __post_init__(self) -> None:
        if not self.span:
            object.__setattr__(self, "span", (self.index,))

    def heads(self) -> tuple[int, ...]:
        return tuple(head for head, _ in self.dependencies)

    def has_relation(self, tag: str) -> bool:
        return any(rel == tag for _, rel in self.dependencies)


@dataclass(frozen=True)
class SdpSentence:
    index: int
    text: str
    tokens: tuple[SdpToken, ...]

    def token(self, index: int) -> SdpToken:
        return self.tokens[index - 1]

    def roots(self) -> tuple[SdpToken, ...]:
        return tuple(t for t in self.tokens if 0 in t.heads())


@dataclass(frozen=True)
class SdpDocument:
    """Immutable, validated parse of one manual (or one question)."""

    manual_id: str
    sentences: tuple[SdpSentence, ...]
    tag_extensions: tuple[tuple[str, ArgCategory], ...] = ()
    space_delimited: bool = True

    def arg_category(self, tag: str) -> ArgCategory | None:
        """Tag alignment with this document's extensions applied."""
        for name, category in self.tag_extensions:
            if name == tag:
                return category
        return map_tag_to_arg(tag)

    @property
    def joiner(self) -> str:
        return " " if self.space_delimited else ""


ByteSource = Union[str, Path, bytes, IO[bytes], IO[str]]


def _read_text(source: ByteSource) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def load_sdp_document(source: ByteSource) -> SdpDocument:
    """Parse and validate a document in the external JSON layout.

    Raises MalformedInput on syntax or schema problems, UnknownTag for
    vocabulary violations, CyclicDependency when a sentence's dependency
    graph is not acyclic.
    """
    text = _read_text(source)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    return document_from_dict(raw)


def document_from_dict(raw: object) -> SdpDocument:
    if not isinstance(raw, dict):
        raise MalformedInput("document root must be an object")
    manual_id = raw.get("manual_id")
    if not isinstance(manual_id, str) or not manual_id:
        raise MalformedInput("manual_id must be a non-empty string")
    extensions = _parse_extensions(raw.get("tag_extensions", {}))
    known = set(BASE_VOCABULARY) | {name for name, _ in extensions}
    space_delimited = raw.get("space_delimited", True)
    if not isinstance(space_delimited, bool):
        raise MalformedInput("space_delimited must be a boolean")

    raw_sentences = raw.get("sentences")
    if not isinstance(raw_sentences, list):
        raise MalformedInput("sentences must be a list")
    sentences = []
    for position, raw_sentence in enumerate(raw_sentences):
        sentence = _parse_sentence(raw_sentence, known)
        if sentence.index != position:
            raise MalformedInput(
                f"sentence index {sentence.index} out of order, expected {position}"
            )
        _check_acyclic(sentence)
        sentences.append(sentence)
    return SdpDocument(
        manual_id=manual_id,
        sentences=tuple(sentences),
        tag_extensions=extensions,
        space_delimited=space_delimited,
    )


def _parse_extensions(raw: object) -> tuple[tuple[str, ArgCategory], ...]:
    if not isinstance(raw, dict):
        raise MalformedInput("tag_extensions must be an object")
    extensions = []
    for name, category in sorted(raw.items()):
        if name in BASE_VOCABULARY:
            raise MalformedInput(f"tag_extensions may not override base tag {name!r}")
        try:
            parsed = ArgCategory(category)
        except ValueError:
            raise MalformedInput(
                f"tag_extensions[{name!r}] must name an argument category"
            ) from None
        if parsed in (ArgCategory.ATT, ArgCategory.STATE):
            raise MalformedInput(
                f"tag_extensions[{name!r}] must map to MOD, TIME, LOC, MANN, or FN"
            )
        extensions.append((name, parsed))
    return tuple(extensions)


def _parse_sentence(raw: object, known_tags: set[str]) -> SdpSentence:
    if not isinstance(raw, dict):
        raise MalformedInput("sentence must be an object")
    index = raw.get("index")
    text = raw.get("text", "")
    raw_tokens = raw.get("tokens")
    if not isinstance(index, int) or index < 0:
        raise MalformedInput("sentence index must be a non-negative integer")
    if not isinstance(text, str):
        raise MalformedInput("sentence text must be a string")
    if not isinstance(raw_tokens, list):
        raise MalformedInput(f"sentence {index}: tokens must be a list")

    tokens = []
    for position, raw_token in enumerate(raw_tokens, start=1):
        if not isinstance(raw_token, dict):
            raise MalformedInput(f"sentence {index}: token must be an object")
        i = raw_token.get("i")
        form = raw_token.get("form")
        deps = raw_token.get("deps")
        if i != position:
            raise MalformedInput(
                f"sentence {index}: token index {i!r} not contiguous, expected {position}"
            )
        if not isinstance(form, str) or not form:
            raise MalformedInput(f"sentence {index}: token {position} has no form")
        if not isinstance(deps, list) or not deps:
            raise MalformedInput(
                f"sentence {index}: token {position} must have at least one dependency"
            )
        parsed_deps = []
        for dep in deps:
            if (
                not isinstance(dep, (list, tuple))
                or len(dep) != 2
                or not isinstance(dep[0], int)
                or not isinstance(dep[1], str)
            ):
                raise MalformedInput(
                    f"sentence {index}: token {position} has a malformed dependency"
                )
            head, tag = dep
            if tag not in known_tags:
                raise UnknownTag(
                    f"sentence {index}: token {position} uses unknown tag {tag!r}"
                )
            parsed_deps.append((head, tag))
        tokens.append(
            SdpToken(index=position, surface=form, dependencies=tuple(parsed_deps))
        )

    count = len(tokens)
    for token in tokens:
        for head in token.heads():
            if head < 0 or head > count:
                raise MalformedInput(
                    f"sentence {index}: token {token.index} points at missing head {head}"
                )
    return SdpSentence(index=index, text=text, tokens=tuple(tokens))


def _check_acyclic(sentence: SdpSentence) -> None:
    # colors: 0 unvisited, 1 on stack, 2 done; edges run dependent -> head
    color = [0] * (len(sentence.tokens) + 1)

    def visit(index: int) -> None:
        color[index] = 1
        for head in sentence.token(index).heads():
            if head == 0:
                continue
            if color[head] == 1:
                raise CyclicDependency(
                    f"sentence {sentence.index}: dependency cycle through token {head}"
                )
            if color[head] == 0:
                visit(head)
        color[index] = 2

    for token in sentence.tokens:
        if color[token.index] == 0:
            visit(token.index)


def document_to_dict(doc: SdpDocument) -> dict:
    out: dict = {"manual_id": doc.manual_id}
    if not doc.space_delimited:
        out["space_delimited"] = False
    if doc.tag_extensions:
        out["tag_extensions"] = {
            name: category.value for name, category in doc.tag_extensions
        }
    out["sentences"] = [
        {
            "index": sentence.index,
            "text": sentence.text,
            "tokens": [
                {
                    "i": token.index,
                    "form": token.surface,
                    "deps": [[head, tag] for head, tag in token.dependencies],
                }
                for token in sentence.tokens
            ],
        }
        for sentence in doc.sentences
    ]
    return out


def serialize_document(doc: SdpDocument) -> bytes:
    """Canonical byte form: sorted keys, no insignificant whitespace."""
    payload = json.dumps(
        document_to_dict(doc), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )
    return (payload + "\n").encode("utf-8")


def iter_jsonl_documents(stream: Iterable[str] | IO[str]) -> Iterable[SdpDocument]:
    """Yield documents from a JSON-lines corpus stream."""
    if isinstance(stream, io.TextIOBase):
        lines: Iterable[str] = stream
    else:
        lines = stream
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"line {number}: invalid JSON: {exc}") from exc
        yield document_from_dict(raw)
