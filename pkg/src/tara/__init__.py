"""Joint step/fact graphs for user manuals, with question answering.

The pipeline: parsed manuals (``sdp``) are normalized into predicate
frames (``preprocess``), frames become heterogeneous graphs (``builder``,
``graph``), questions are matched against manual graphs (``matching``) and
answered by conflict inference (``inference``).  ``baselines`` and
``evaluation`` provide comparison systems and the metric harness; ``cli``
is the command-line surface.
"""

from .builder import (
    BuildResult,
    StateVerbLexicon,
    build,
    build_manual,
    build_question,
    build_question_graph,
    merge_entities,
)
from .graph import (
    Argument,
    EdgeKind,
    NodeKind,
    TaraEdge,
    TaraGraph,
    TaraNode,
    answer_basic,
    deserialize_graph,
    serialize_graph,
    validate,
)
from .inference import Answer, AnswerStatus, Conflict, ConflictKind, answer_question
from .matching import (
    Matching,
    brute_force_match,
    levenshtein,
    match_subgraph,
    node_similarity,
)
from .preprocess import (
    PredicateFrame,
    collapse_offspring,
    extract_frames,
    insert_imperative_subject,
    reverse_user_patient,
)
from .sdp import (
    ArgCategory,
    SdpDocument,
    SdpSentence,
    SdpToken,
    load_sdp_document,
    map_tag_to_arg,
    serialize_document,
)

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "AnswerStatus",
    "ArgCategory",
    "Argument",
    "BuildResult",
    "Conflict",
    "ConflictKind",
    "EdgeKind",
    "Matching",
    "NodeKind",
    "PredicateFrame",
    "SdpDocument",
    "SdpSentence",
    "SdpToken",
    "StateVerbLexicon",
    "TaraEdge",
    "TaraGraph",
    "TaraNode",
    "answer_basic",
    "answer_question",
    "brute_force_match",
    "build",
    "build_manual",
    "build_question",
    "build_question_graph",
    "collapse_offspring",
    "deserialize_graph",
    "extract_frames",
    "insert_imperative_subject",
    "levenshtein",
    "load_sdp_document",
    "map_tag_to_arg",
    "match_subgraph",
    "merge_entities",
    "node_similarity",
    "reverse_user_patient",
    "serialize_document",
    "serialize_graph",
    "validate",
]
