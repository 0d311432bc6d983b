"""Typed bipolar argument graphs: the domain model.

An argument carries four tagging dimensions:

* ontological - what kind of behaviour-change content it is (risk, benefit,
  myth, ...), a closed set of 14 kinds; an argument may carry several.
* functional  - its dialogue role, exactly one of nine leaves grouped into
  prospective (goals), objective (factual/evidence/example), and subjective
  (opinion/preference/counter-bias).
* context     - ground atoms the user's situation must satisfy before the
  argument may be used (see contextengine).
* topic       - curated keywords and ontology-style topic labels
  (see topicindex).

Arcs are attack or support. Graphs are immutable once loaded and may be
shared freely across sessions.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .contextengine import Atom, ContextError


# ---------------------------------------------------------------------------
# Errors and violations
# ---------------------------------------------------------------------------

class GraphError(Exception):
    """Base class for graph-file and graph-structure errors."""


class GraphSyntaxError(GraphError):
    """Malformed document: bad JSON, wrong shapes, unknown keys, bad ids."""


class UnknownTagError(GraphError):
    """Ontological/functional/relation value outside its closed set."""


class DuplicateIdError(GraphError):
    pass


class DuplicateArcError(GraphError):
    """Same (source, target, relation) twice, or same pair with both relations."""


class DanglingArcError(GraphError):
    pass


class SelfArcError(GraphError):
    pass


class RankOnNonGoalError(GraphError):
    pass


class StopWordKeywordError(GraphError):
    pass


class UnknownArgumentError(GraphError, KeyError):
    pass


class NotAGoalLeafError(GraphError):
    pass


@dataclass(frozen=True)
class Violation:
    """A broken type invariant, named after the offending id or arc."""

    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}({self.subject}): {self.message}"


_VIOLATION_ERRORS: dict[str, type[GraphError]] = {
    "bad-id": GraphSyntaxError,
    "empty-text": GraphSyntaxError,
    "empty-ontological": GraphSyntaxError,
    "qualifier-on-non-risk-benefit": UnknownTagError,
    "empty-keyword": GraphSyntaxError,
    "stop-word-keyword": StopWordKeywordError,
    "bad-rank": GraphSyntaxError,
    "rank-on-non-goal": RankOnNonGoalError,
    "self-arc": SelfArcError,
    "dangling-arc": DanglingArcError,
    "duplicate-arc": DuplicateArcError,
}


# ---------------------------------------------------------------------------
# Tag vocabularies
# ---------------------------------------------------------------------------

class OntologicalKind(str, Enum):
    CAUSE = "cause"
    ATTITUDE = "attitude"
    RISK = "risk"
    BENEFIT = "benefit"
    OPPORTUNITY = "opportunity"
    COST = "cost"
    COMMITMENT = "commitment"
    MOTIVATION = "motivation"
    CAPACITY = "capacity"
    OBSTACLE = "obstacle"
    BACKGROUND = "background"
    SIDE_EFFECT = "side-effect"
    COMMUNITY = "community"
    MYTH = "myth"


# Only risks and benefits come in graded/timed subtypes ("large", "short-term",
# "threat", "reward", ...); the qualifier vocabulary itself is open.
_QUALIFIABLE = {OntologicalKind.RISK, OntologicalKind.BENEFIT}


@dataclass(frozen=True, order=True)
class OntologicalType:
    kind: OntologicalKind
    qualifier: str | None = None

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.qualifier}" if self.qualifier else self.kind.value


class FunctionalCategory(str, Enum):
    PROSPECTIVE = "prospective"
    OBJECTIVE = "objective"
    SUBJECTIVE = "subjective"


class FunctionalType(str, Enum):
    PERSUASION_GOAL = "persuasion-goal"
    USER_GOAL = "user-goal"
    SOCIETAL_GOAL = "societal-goal"
    FACTUAL = "factual"
    EVIDENCE = "evidence"
    EXAMPLE = "example"
    OPINION = "opinion"
    PREFERENCE = "preference"
    COUNTER_BIAS = "counter-bias"

    @property
    def category(self) -> FunctionalCategory:
        return _LEAF_CATEGORY[self]


_LEAF_CATEGORY = {
    FunctionalType.PERSUASION_GOAL: FunctionalCategory.PROSPECTIVE,
    FunctionalType.USER_GOAL: FunctionalCategory.PROSPECTIVE,
    FunctionalType.SOCIETAL_GOAL: FunctionalCategory.PROSPECTIVE,
    FunctionalType.FACTUAL: FunctionalCategory.OBJECTIVE,
    FunctionalType.EVIDENCE: FunctionalCategory.OBJECTIVE,
    FunctionalType.EXAMPLE: FunctionalCategory.OBJECTIVE,
    FunctionalType.OPINION: FunctionalCategory.SUBJECTIVE,
    FunctionalType.PREFERENCE: FunctionalCategory.SUBJECTIVE,
    FunctionalType.COUNTER_BIAS: FunctionalCategory.SUBJECTIVE,
}

GOAL_LEAVES = (
    FunctionalType.PERSUASION_GOAL,
    FunctionalType.USER_GOAL,
    FunctionalType.SOCIETAL_GOAL,
)


class Relation(str, Enum):
    ATTACK = "attack"
    SUPPORT = "support"


# ---------------------------------------------------------------------------
# Graph data
# ---------------------------------------------------------------------------

_ID_RE = re.compile(r"[A-Za-z0-9_-]+\Z")


@dataclass(frozen=True)
class Argument:
    id: str
    text: str
    ontological: frozenset[OntologicalType]
    functional: FunctionalType
    context: frozenset[Atom] = frozenset()
    keywords: tuple[str, ...] = ()
    topics: frozenset[str] = frozenset()
    rank: int | None = None


@dataclass(frozen=True)
class Arc:
    source: str
    target: str
    relation: Relation

    def __str__(self) -> str:
        return f"{self.source}-{self.relation.value}->{self.target}"


@dataclass(frozen=True)
class ArgumentGraph:
    name: str
    arguments: Mapping[str, Argument] = field(default_factory=dict)
    arcs: frozenset[Arc] = frozenset()

    def __contains__(self, arg_id: str) -> bool:
        return arg_id in self.arguments

    def argument(self, arg_id: str) -> Argument:
        try:
            return self.arguments[arg_id]
        except KeyError:
            raise UnknownArgumentError(arg_id) from None

    def subgraph(self, keep: Iterable[str]) -> "ArgumentGraph":
        keep = set(keep)
        return ArgumentGraph(
            name=self.name,
            arguments={i: a for i, a in self.arguments.items() if i in keep},
            arcs=frozenset(
                arc for arc in self.arcs if arc.source in keep and arc.target in keep
            ),
        )


def attackers(graph: ArgumentGraph, arg_id: str) -> frozenset[str]:
    """The sources of attack arcs targeting arg_id."""
    if arg_id not in graph:
        raise UnknownArgumentError(arg_id)
    return frozenset(
        arc.source
        for arc in graph.arcs
        if arc.target == arg_id and arc.relation is Relation.ATTACK
    )


def supporters(graph: ArgumentGraph, arg_id: str) -> frozenset[str]:
    """The sources of support arcs targeting arg_id."""
    if arg_id not in graph:
        raise UnknownArgumentError(arg_id)
    return frozenset(
        arc.source
        for arc in graph.arcs
        if arc.target == arg_id and arc.relation is Relation.SUPPORT
    )


def goals(graph: ArgumentGraph, leaf: FunctionalType) -> list[str]:
    """Arguments with the given goal leaf, most preferred first.

    Rank 1 sorts first, unranked goals after all ranked ones, ties broken
    lexicographically by id.
    """
    if leaf not in GOAL_LEAVES:
        raise NotAGoalLeafError(leaf.value)
    matching = [a for a in graph.arguments.values() if a.functional is leaf]
    matching.sort(key=lambda a: (a.rank is None, a.rank if a.rank is not None else 0, a.id))
    return [a.id for a in matching]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _default_stop_words() -> frozenset[str]:
    # Deferred import: topicindex builds indexes *over* graphs, so it imports
    # this module at top level; the stop list alone is needed here.
    from .topicindex import default_stoplist

    return default_stoplist().words


def validate(graph: ArgumentGraph, stop_words: frozenset[str] | None = None) -> list[Violation]:
    """All broken type invariants of the graph, in a deterministic order.

    Violations are data, not failures; load_graph raises the first one it
    finds as a typed error instead.
    """
    if stop_words is None:
        stop_words = _default_stop_words()
    out: list[Violation] = []
    for arg_id, arg in graph.arguments.items():
        if not _ID_RE.match(arg_id) or arg.id != arg_id:
            out.append(Violation("bad-id", arg_id, "id must match [A-Za-z0-9_-]+ and map key"))
        if not arg.text:
            out.append(Violation("empty-text", arg_id, "argument text must be non-empty"))
        if not arg.ontological:
            out.append(Violation("empty-ontological", arg_id, "at least one ontological type required"))
        for tag in sorted(arg.ontological):
            if tag.qualifier is not None and tag.kind not in _QUALIFIABLE:
                out.append(
                    Violation(
                        "qualifier-on-non-risk-benefit",
                        arg_id,
                        f"qualifier {tag.qualifier!r} not allowed on {tag.kind.value}",
                    )
                )
        for kw in arg.keywords:
            if not kw:
                out.append(Violation("empty-keyword", arg_id, "keywords must be non-empty strings"))
            elif kw.lower() in stop_words:
                out.append(Violation("stop-word-keyword", arg_id, f"keyword {kw!r} is a stop word"))
        if arg.rank is not None:
            if not isinstance(arg.rank, int) or arg.rank < 1:
                out.append(Violation("bad-rank", arg_id, f"rank must be a positive integer, got {arg.rank!r}"))
            if arg.functional.category is not FunctionalCategory.PROSPECTIVE:
                out.append(
                    Violation(
                        "rank-on-non-goal",
                        arg_id,
                        f"rank {arg.rank} on non-prospective argument ({arg.functional.value})",
                    )
                )
    seen_pairs: dict[tuple[str, str], set[Relation]] = {}
    for arc in sorted(graph.arcs, key=lambda a: (a.source, a.target, a.relation.value)):
        label = str(arc)
        if arc.source == arc.target:
            out.append(Violation("self-arc", label, "source and target must differ"))
        for endpoint in (arc.source, arc.target):
            if endpoint not in graph.arguments:
                out.append(Violation("dangling-arc", label, f"endpoint {endpoint!r} not in graph"))
        rels = seen_pairs.setdefault((arc.source, arc.target), set())
        if rels:
            out.append(
                Violation(
                    "duplicate-arc",
                    label,
                    "a pair of arguments may carry at most one arc",
                )
            )
        rels.add(arc.relation)
    out.sort(key=lambda v: (v.rule, v.subject, v.message))
    return out


@dataclass(frozen=True)
class LintWarning:
    """A structural guideline breach; advisory, never blocks loading."""

    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}({self.subject}): {self.message}"


def lint(graph: ArgumentGraph) -> list[LintWarning]:
    """Structural guideline checks over a valid graph.

    * myth-unattacked: a Myth-tagged argument should be attacked by at least
      one objective-category argument.
    * factual-attacks-factual: an attack between two Factual arguments is
      suspicious - at most one side of an incontrovertible conflict is factual.
    * unranked-goal-among-ranked: if any persuasion goal is ranked, all should be.
    * empty-keywords: the argument has neither curated keywords nor topics.
    """
    out: list[LintWarning] = []
    for arg_id in sorted(graph.arguments):
        arg = graph.arguments[arg_id]
        if any(t.kind is OntologicalKind.MYTH for t in arg.ontological):
            objective_attackers = [
                a
                for a in attackers(graph, arg_id)
                if graph.arguments[a].functional.category is FunctionalCategory.OBJECTIVE
            ]
            if not objective_attackers:
                out.append(
                    LintWarning("myth-unattacked", arg_id, "myth has no objective attacker")
                )
        if not arg.keywords and not arg.topics:
            out.append(
                LintWarning("empty-keywords", arg_id, "no curated keywords and no topics")
            )
    for arc in sorted(graph.arcs, key=lambda a: (a.source, a.target, a.relation.value)):
        if (
            arc.relation is Relation.ATTACK
            and graph.arguments[arc.source].functional is FunctionalType.FACTUAL
            and graph.arguments[arc.target].functional is FunctionalType.FACTUAL
        ):
            out.append(
                LintWarning(
                    "factual-attacks-factual",
                    str(arc),
                    "attack between two factual arguments",
                )
            )
    persuasion = [graph.arguments[i] for i in goals(graph, FunctionalType.PERSUASION_GOAL)]
    if any(g.rank is not None for g in persuasion):
        for g in persuasion:
            if g.rank is None:
                out.append(
                    LintWarning(
                        "unranked-goal-among-ranked",
                        g.id,
                        "some persuasion goals are ranked but this one is not",
                    )
                )
    out.sort(key=lambda w: (w.rule, w.subject))
    return out


# ---------------------------------------------------------------------------
# Graph-file parsing and serialization
# ---------------------------------------------------------------------------

_TOP_KEYS = {"name", "arguments", "arcs"}
_ARG_KEYS = {"id", "text", "ontological", "functional", "context", "keywords", "topics", "rank"}
_TAG_KEYS = {"kind", "qualifier"}
_ARC_KEYS = {"source", "target", "relation"}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise GraphSyntaxError(message)


def _parse_ontological(raw: object, arg_id: str) -> frozenset[OntologicalType]:
    _require(isinstance(raw, list) and raw, f"{arg_id}: 'ontological' must be a non-empty list")
    tags = []
    for item in raw:
        _require(isinstance(item, dict), f"{arg_id}: ontological entries must be objects")
        unknown = set(item) - _TAG_KEYS
        _require(not unknown, f"{arg_id}: unknown ontological keys {sorted(unknown)}")
        kind_raw = item.get("kind")
        _require(isinstance(kind_raw, str), f"{arg_id}: ontological 'kind' must be a string")
        try:
            kind = OntologicalKind(kind_raw)
        except ValueError:
            raise UnknownTagError(f"{arg_id}: unknown ontological kind {kind_raw!r}") from None
        qualifier = item.get("qualifier")
        if qualifier is not None:
            _require(
                isinstance(qualifier, str) and bool(qualifier),
                f"{arg_id}: qualifier must be a non-empty string",
            )
            if kind not in _QUALIFIABLE:
                raise UnknownTagError(
                    f"{arg_id}: qualifier {qualifier!r} only allowed on risk/benefit"
                )
        tags.append(OntologicalType(kind, qualifier))
    return frozenset(tags)


def _parse_argument(raw: object) -> Argument:
    _require(isinstance(raw, dict), "argument entries must be objects")
    unknown = set(raw) - _ARG_KEYS
    _require(not unknown, f"unknown argument keys {sorted(unknown)}")
    arg_id = raw.get("id")
    _require(isinstance(arg_id, str) and bool(_ID_RE.match(arg_id or "")),
             f"bad argument id {arg_id!r}")
    text = raw.get("text")
    _require(isinstance(text, str) and bool(text), f"{arg_id}: 'text' must be a non-empty string")
    functional_raw = raw.get("functional")
    _require(isinstance(functional_raw, str), f"{arg_id}: 'functional' must be a string")
    try:
        functional = FunctionalType(functional_raw)
    except ValueError:
        raise UnknownTagError(f"{arg_id}: unknown functional type {functional_raw!r}") from None
    ontological = _parse_ontological(raw.get("ontological"), arg_id)
    context_raw = raw.get("context", [])
    _require(isinstance(context_raw, list), f"{arg_id}: 'context' must be a list of atom strings")
    try:
        context = frozenset(Atom.parse(a) for a in context_raw)
    except (ContextError, TypeError) as exc:
        raise GraphSyntaxError(f"{arg_id}: bad context atom: {exc}") from exc
    keywords_raw = raw.get("keywords", [])
    _require(
        isinstance(keywords_raw, list) and all(isinstance(k, str) for k in keywords_raw),
        f"{arg_id}: 'keywords' must be a list of strings",
    )
    topics_raw = raw.get("topics", [])
    _require(
        isinstance(topics_raw, list) and all(isinstance(t, str) and t for t in topics_raw),
        f"{arg_id}: 'topics' must be a list of non-empty strings",
    )
    rank = raw.get("rank")
    if rank is not None:
        _require(isinstance(rank, int) and not isinstance(rank, bool) and rank >= 1,
                 f"{arg_id}: 'rank' must be a positive integer")
    return Argument(
        id=arg_id,
        text=text,
        ontological=ontological,
        functional=functional,
        context=context,
        keywords=tuple(keywords_raw),
        topics=frozenset(topics_raw),
        rank=rank,
    )


def _parse_arc(raw: object) -> Arc:
    _require(isinstance(raw, dict), "arc entries must be objects")
    unknown = set(raw) - _ARC_KEYS
    _require(not unknown, f"unknown arc keys {sorted(unknown)}")
    source = raw.get("source")
    target = raw.get("target")
    _require(isinstance(source, str) and isinstance(target, str),
             f"arc endpoints must be strings: {raw!r}")
    relation_raw = raw.get("relation")
    _require(isinstance(relation_raw, str), "arc 'relation' must be a string")
    try:
        relation = Relation(relation_raw)
    except ValueError:
        raise UnknownTagError(f"unknown arc relation {relation_raw!r}") from None
    return Arc(source=source, target=target, relation=relation)


def load_graph(document, stop_words: frozenset[str] | None = None) -> ArgumentGraph:
    """Parse and fully validate a graph file (bytes, str, path, or stream).

    Parsing is total over valid files and order-independent; the first broken
    invariant raises the matching typed error (DuplicateId, DanglingArc,
    UnknownTag, SelfArc, RankOnNonGoal, StopWordKeyword, or GraphSyntaxError).
    """
    if isinstance(document, (bytes, bytearray)):
        text = document.decode("utf-8")
    elif isinstance(document, str):
        text = document
    elif isinstance(document, io.IOBase) or hasattr(document, "read"):
        data = document.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    else:
        with open(document, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSyntaxError(f"not valid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, f"unknown top-level keys {sorted(unknown)}")
    name = doc.get("name")
    _require(isinstance(name, str), "'name' must be a string")
    args_raw = doc.get("arguments", [])
    arcs_raw = doc.get("arcs", [])
    _require(isinstance(args_raw, list), "'arguments' must be a list")
    _require(isinstance(arcs_raw, list), "'arcs' must be a list")

    arguments: dict[str, Argument] = {}
    for raw in args_raw:
        arg = _parse_argument(raw)
        if arg.id in arguments:
            raise DuplicateIdError(f"duplicate argument id {arg.id!r}")
        arguments[arg.id] = arg

    arcs: set[Arc] = set()
    for raw in arcs_raw:
        arc = _parse_arc(raw)
        if arc in arcs:
            raise DuplicateArcError(f"duplicate arc {arc}")
        arcs.add(arc)

    graph = ArgumentGraph(name=name, arguments=arguments, arcs=frozenset(arcs))
    violations = validate(graph, stop_words=stop_words)
    if violations:
        first = violations[0]
        raise _VIOLATION_ERRORS.get(first.rule, GraphSyntaxError)(str(first))
    return graph


def _tag_to_json(tag: OntologicalType) -> dict:
    out: dict = {"kind": tag.kind.value}
    if tag.qualifier is not None:
        out["qualifier"] = tag.qualifier
    return out


def _argument_to_json(arg: Argument) -> dict:
    out: dict = {
        "id": arg.id,
        "text": arg.text,
        "ontological": [_tag_to_json(t) for t in sorted(arg.ontological)],
        "functional": arg.functional.value,
    }
    if arg.context:
        out["context"] = [str(a) for a in sorted(arg.context)]
    if arg.keywords:
        out["keywords"] = list(arg.keywords)
    if arg.topics:
        out["topics"] = sorted(arg.topics)
    if arg.rank is not None:
        out["rank"] = arg.rank
    return out


def serialize(graph: ArgumentGraph, indent: int | None = 2) -> str:
    """Deterministic graph-file rendering; load_graph(serialize(g)) == g."""
    doc = {
        "name": graph.name,
        "arguments": [
            _argument_to_json(graph.arguments[i]) for i in sorted(graph.arguments)
        ],
        "arcs": [
            {"source": a.source, "target": a.target, "relation": a.relation.value}
            for a in sorted(graph.arcs, key=lambda a: (a.source, a.target, a.relation.value))
        ],
    }
    return json.dumps(doc, indent=indent, ensure_ascii=True) + "\n"
