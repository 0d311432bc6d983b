"""Ground Horn-rule inference over context atoms.

Arguments carry context tags (sets of ground atoms); a user's situation is a
ContextBase of ground facts plus ground rules such as

    geo(England) <- geo(London)

An argument may be used in a dialogue only if every one of its context atoms
is derivable from the user's base. There are no variables and no negation:
the closure is a plain monotone fixpoint, so applicability can only grow as
facts are added.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, argmodel imports Atom
    from .argmodel import ArgumentGraph


class ContextError(ValueError):
    """Base class for malformed atoms, rules, or rule files."""


class AtomSyntaxError(ContextError):
    pass


class RuleSyntaxError(ContextError):
    pass


# Predicates follow the stated ident grammar; constants additionally allow a
# leading digit (age-over(64)).
_PREDICATE_RE = re.compile(r"[A-Za-z][A-Za-z0-9-]*\Z")
_CONSTANT_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9-]*\Z")
_ATOM_RE = re.compile(r"\s*([A-Za-z][A-Za-z0-9-]*)\s*\(\s*([A-Za-z0-9][A-Za-z0-9-]*)\s*\)\s*\Z")


@dataclass(frozen=True, order=True)
class Atom:
    """A ground literal ``predicate(constant)``, e.g. geo(England).

    Comparison is case-sensitive exact match.
    """

    predicate: str
    constant: str

    def __post_init__(self) -> None:
        if not _PREDICATE_RE.match(self.predicate):
            raise AtomSyntaxError(f"bad atom predicate: {self.predicate!r}")
        if not _CONSTANT_RE.match(self.constant):
            raise AtomSyntaxError(f"bad atom constant: {self.constant!r}")

    @classmethod
    def parse(cls, text: str) -> "Atom":
        m = _ATOM_RE.match(text)
        if m is None:
            raise AtomSyntaxError(f"not an atom: {text!r}")
        return cls(m.group(1), m.group(2))

    def __str__(self) -> str:
        return f"{self.predicate}({self.constant})"


@dataclass(frozen=True)
class Rule:
    """A ground Horn rule: every body atom holds => the head holds."""

    body: frozenset[Atom]
    head: Atom

    def __post_init__(self) -> None:
        if not self.body:
            raise RuleSyntaxError("rule body must be non-empty")
        if self.head in self.body:
            raise RuleSyntaxError(f"rule head {self.head} appears in its own body")

    def __str__(self) -> str:
        return f"{self.head} <- {', '.join(str(a) for a in sorted(self.body))}"


@dataclass(frozen=True)
class ContextBase:
    """A user's situation: ground facts plus the rule taxonomy that extends them."""

    facts: frozenset[Atom] = frozenset()
    rules: frozenset[Rule] = frozenset()

    def with_facts(self, atoms: Iterable[Atom]) -> "ContextBase":
        return ContextBase(self.facts | frozenset(atoms), self.rules)

    def with_rules(self, rules: Iterable[Rule]) -> "ContextBase":
        return ContextBase(self.facts, self.rules | frozenset(rules))


def closure(base: ContextBase) -> frozenset[Atom]:
    """Least fixpoint of forward chaining over the base's facts and rules.

    Terminates because the atom universe is finite (every derivable atom is
    some rule's head) and each pass either adds an atom or stops.
    """
    known = set(base.facts)
    pending = set(base.rules)
    changed = True
    while changed and pending:
        changed = False
        for rule in list(pending):
            if rule.body <= known:
                pending.discard(rule)
                if rule.head not in known:
                    known.add(rule.head)
                    changed = True
    return frozenset(known)


def satisfies(base: ContextBase, required: Iterable[Atom]) -> bool:
    """True iff every required atom is in the closure; an empty requirement holds."""
    required = frozenset(required)
    if not required:
        return True
    return required <= closure(base)


def applicable(graph: "ArgumentGraph", base: ContextBase) -> "ArgumentGraph":
    """Induced subgraph on the arguments whose context tags the base satisfies.

    Arcs survive only when both endpoints do. The result may lack a
    persuasion goal; dialogue setup must check for that.
    """
    derived = closure(base)
    keep = {
        arg_id
        for arg_id, arg in graph.arguments.items()
        if arg.context <= derived
    }
    return graph.subgraph(keep)


def parse_rules(text: str) -> ContextBase:
    """Parse a rule file: one `head <- body1, body2` per line, bare `fact.`
    lines for shared facts, `#` comments, blank lines ignored."""
    facts: set[Atom] = set()
    rules: set[Rule] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "<-" in line:
            head_part, body_part = line.split("<-", 1)
            if line.endswith("."):
                body_part = body_part.rstrip()[:-1]
            try:
                head = Atom.parse(head_part)
                body = frozenset(Atom.parse(part) for part in body_part.split(","))
                rules.add(Rule(body=body, head=head))
            except ContextError as exc:
                raise RuleSyntaxError(f"line {lineno}: {exc}") from exc
        elif line.endswith("."):
            try:
                facts.add(Atom.parse(line[:-1]))
            except ContextError as exc:
                raise RuleSyntaxError(f"line {lineno}: {exc}") from exc
        else:
            raise RuleSyntaxError(
                f"line {lineno}: expected `head <- body` or `fact.`, got {raw!r}"
            )
    return ContextBase(facts=frozenset(facts), rules=frozenset(rules))


def load_rules(path) -> ContextBase:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rules(fh.read())
