"""Exception hierarchy shared by every module.

Each error class carries a stable ``code`` string that the CLI prints on
stderr, so scripts can branch on error kinds without parsing messages.
"""

from __future__ import annotations


class TaraError(Exception):
    """Base class for all engine errors."""

    code = "TaraError"
    exit_code = 2


class MalformedInput(TaraError):
    """Input document is syntactically or structurally invalid."""

    code = "MalformedInput"


class UnknownTag(MalformedInput):
    """A dependency tag is outside the vocabulary and has no extension mapping."""

    code = "UnknownTag"


class CyclicDependency(MalformedInput):
    """A sentence's dependency graph contains a cycle."""

    code = "CyclicDependency"


class MalformedGraphFile(TaraError):
    """A graph file could not be parsed or misses required fields."""

    code = "MalformedGraphFile"


class MalformedCorpus(TaraError):
    """A corpus directory violates the expected layout or references bad data."""

    code = "MalformedCorpus"


class UnknownElement(TaraError):
    """A node or argument id does not exist in the graph."""

    code = "UnknownElement"


class SizeGuardExceeded(TaraError):
    """Brute-force matching was asked to handle a graph above its size guard."""

    code = "SizeGuardExceeded"


class QuestionParseUnavailable(TaraError):
    """A question was given as raw text and no parsed form could be located."""

    code = "QuestionParseUnavailable"
