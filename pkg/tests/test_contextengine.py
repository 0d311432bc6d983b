"""Atom/rule parsing and forward-chaining closure."""

from __future__ import annotations

import pytest

from persuade.contextengine import (
    Atom,
    AtomSyntaxError,
    ContextBase,
    Rule,
    RuleSyntaxError,
    closure,
    parse_rules,
    satisfies,
)


def atom(s: str) -> Atom:
    return Atom.parse(s)


def rule(head: str, *body: str) -> Rule:
    return Rule(head=atom(head), body=frozenset(atom(b) for b in body))


class TestAtom:
    def test_parse_and_render(self):
        a = atom("geo(England)")
        assert a.predicate == "geo"
        assert a.constant == "England"
        assert str(a) == "geo(England)"

    def test_numeric_constant_allowed(self):
        assert str(atom("age-over(64)")) == "age-over(64)"

    def test_case_sensitive(self):
        assert atom("geo(england)") != atom("geo(England)")

    @pytest.mark.parametrize(
        "bad", ["geo", "geo()", "(England)", "geo(Eng land)", "1geo(x)", "geo(x)(y)", ""]
    )
    def test_rejects_malformed(self, bad):
        with pytest.raises(AtomSyntaxError):
            atom(bad)


class TestRule:
    def test_head_not_in_body(self):
        with pytest.raises(RuleSyntaxError):
            rule("geo(England)", "geo(England)")

    def test_empty_body_rejected(self):
        with pytest.raises(RuleSyntaxError):
            Rule(head=atom("a(b)"), body=frozenset())


class TestClosure:
    def test_london_implies_england(self):
        base = ContextBase(
            facts=frozenset({atom("geo(London)")}),
            rules=frozenset({rule("geo(England)", "geo(London)")}),
        )
        assert closure(base) == {atom("geo(London)"), atom("geo(England)")}

    def test_empty_facts_fixpoint_empty(self):
        base = ContextBase(rules=frozenset({rule("a(x)", "b(x)")}))
        assert closure(base) == frozenset()

    def test_chain(self):
        base = ContextBase(
            facts=frozenset({atom("a(x)")}),
            rules=frozenset({rule("b(x)", "a(x)"), rule("c(x)", "b(x)")}),
        )
        assert closure(base) == {atom("a(x)"), atom("b(x)"), atom("c(x)")}

    def test_conjunctive_body(self):
        base = ContextBase(
            facts=frozenset({atom("a(x)")}),
            rules=frozenset({rule("c(x)", "a(x)", "b(x)")}),
        )
        assert atom("c(x)") not in closure(base)
        assert atom("c(x)") in closure(base.with_facts([atom("b(x)")]))


class TestSatisfies:
    def test_inferred_tag_satisfied(self):
        base = ContextBase(
            facts=frozenset({atom("geo(London)")}),
            rules=frozenset({rule("geo(England)", "geo(London)")}),
        )
        assert satisfies(base, {atom("geo(England)")})

    def test_scotland_tag_not_satisfied_in_england(self):
        base = ContextBase(facts=frozenset({atom("geo(England)")}))
        assert not satisfies(base, {atom("geo(Scotland)")})

    def test_empty_requirement_always_holds(self):
        assert satisfies(ContextBase(), frozenset())


class TestRuleFile:
    def test_rules_facts_and_comments(self):
        base = parse_rules(
            """
            # taxonomy
            geo(England) <- geo(London)
            employer(nhs) <- role(nurse), role(clinical)
            geo(UK).   # shared fact
            """
        )
        assert atom("geo(UK)") in base.facts
        assert rule("geo(England)", "geo(London)") in base.rules
        assert rule("employer(nhs)", "role(nurse)", "role(clinical)") in base.rules

    def test_bad_line_rejected(self):
        with pytest.raises(RuleSyntaxError):
            parse_rules("geo(London)")  # neither rule nor dotted fact
