"""Bundled fixture corpus: a hand-parsed scratch-card promotion manual
(the worked example), a small coupon manual, a raw-text manual, six
questions, and the gold graph of the scratch-card manual."""

from importlib import resources
from pathlib import Path


def fixture_root() -> Path:
    return Path(resources.files(__package__))


def corpus_dir() -> Path:
    return fixture_root() / "corpus"


def scratch_card_manual() -> Path:
    return corpus_dir() / "manuals" / "scratch_card.sdp.json"


def scratch_card_gold_graph() -> Path:
    return corpus_dir() / "gold_graphs" / "scratch_card.tara.json"
