"""Keyword extraction, keyword indexing, and topic-based relevance.

Argument text is treated as a bag of words minus stop words. Keywords that
occur in few arguments discriminate well between regions of the graph; the
score here is the standard natural-log inverse document frequency. Curated
keywords on an argument override extraction so that hand-annotated corpora
(multi-word phrases included) index exactly as written.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping

from .argmodel import Argument, ArgumentGraph


class UnknownKeywordError(KeyError):
    pass


@dataclass(frozen=True)
class StopList:
    words: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    @classmethod
    def from_text(cls, text: str) -> "StopList":
        words = set()
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                words.add(line.lower())
        return cls(frozenset(words))

    @classmethod
    def from_file(cls, path) -> "StopList":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())


_DEFAULT: StopList | None = None


def default_stoplist() -> StopList:
    """The bundled list of common English function words (between 200 and 300)."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("persuade").joinpath("data/stopwords.txt").read_text("utf-8")
        _DEFAULT = StopList.from_text(text)
    return _DEFAULT


# Tokens are runs of letters/digits; hyphens and apostrophes survive only
# between such runs ("sign-up", "don't"), never at the edges.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['-][^\W_]+)*")


def extract_keywords(text: str, stoplist: StopList) -> list[str]:
    """Lowercased tokens minus stop words, deduplicated, first occurrence first."""
    seen: set[str] = set()
    out: list[str] = []
    for token in _TOKEN_RE.findall(text.lower()):
        if token in stoplist.words or token in seen:
            continue
        seen.add(token)
        out.append(token)
    return out


@dataclass(frozen=True)
class KeywordIndex:
    """Inverse map keyword -> argument ids, over `total` indexed arguments."""

    postings: Mapping[str, frozenset[str]]
    total: int

    def document_frequency(self, keyword: str) -> int:
        if keyword not in self.postings:
            raise UnknownKeywordError(keyword)
        return len(self.postings[keyword])


def effective_keywords(argument: Argument, stoplist: StopList) -> list[str]:
    """Curated keywords when present, else extraction from the text."""
    if argument.keywords:
        return list(argument.keywords)
    return extract_keywords(argument.text, stoplist)


def build_index(graph: ArgumentGraph, stoplist: StopList | None = None) -> KeywordIndex:
    """Index every argument of a valid graph; multi-word curated keywords are
    single units."""
    if stoplist is None:
        stoplist = default_stoplist()
    postings: dict[str, set[str]] = {}
    for arg_id, arg in graph.arguments.items():
        for kw in effective_keywords(arg, stoplist):
            postings.setdefault(kw, set()).add(arg_id)
    return KeywordIndex(
        postings={k: frozenset(v) for k, v in postings.items()},
        total=len(graph.arguments),
    )


def discriminator_score(index: KeywordIndex, keyword: str) -> float:
    """ln(total / document frequency): 0 for a keyword in every argument,
    strictly larger the rarer the keyword is."""
    df = index.document_frequency(keyword)
    return math.log(index.total / df)


def topic_relevance(argument: Argument, interests: Iterable[str]) -> float:
    """Fraction of the argument's topics the user has declared interest in."""
    if not argument.topics:
        return 0.0
    interests = frozenset(interests)
    if not interests:
        return 0.0
    return len(argument.topics & interests) / len(argument.topics)
