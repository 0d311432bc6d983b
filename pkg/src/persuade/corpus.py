"""Bundled machine-readable transcriptions of the case-study graphs.

Six entries ship with the package: the four case studies (women-in-sport,
office-wellbeing, cervical-screening, flu-vaccine), the introductory sports
sign-up example that carries the curated keyword/topic annotations, and the
ranked walking-goals fixture. Each entry is a graph file, a rule file, and a
notes file recording every transcription decision plus the node/arc counts
the transcription was checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .argmodel import ArgumentGraph, load_graph
from .contextengine import ContextBase, parse_rules


class UnknownEntryError(KeyError):
    pass


ENTRY_NAMES: tuple[str, ...] = (
    "women-in-sport",
    "office-wellbeing",
    "cervical-screening",
    "flu-vaccine",
    "sports-signup-example",
    "walking-goals-fixture",
)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    graph: ArgumentGraph
    rules: ContextBase  # shared facts + rule taxonomy, no user facts


def _data(name: str):
    return resources.files("persuade").joinpath(f"data/corpus/{name}")


def load_corpus_entry(name: str) -> CorpusEntry:
    if name not in ENTRY_NAMES:
        raise UnknownEntryError(name)
    graph = load_graph(_data(f"{name}.graph.json").read_text("utf-8"))
    rules = parse_rules(_data(f"{name}.rules").read_text("utf-8"))
    return CorpusEntry(name=name, graph=graph, rules=rules)


def entry_notes(name: str) -> str:
    if name not in ENTRY_NAMES:
        raise UnknownEntryError(name)
    return _data(f"{name}.notes.md").read_text("utf-8")
