"""Scripted persuadees for automated dialogue runs.

A persona plays two roles at once: its `beliefs` map seeds the system's user
model (the system's possibly wrong estimates about this user), and its
`replies` script the user's actual menu answers. Replies win over answers
derived from the seed beliefs - the whole point of a probe is that the
estimate may be wrong. A query with neither a scripted reply nor a belief to
fall back on is a PersonaIncomplete error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from .argmodel import ArgumentGraph
from .contextengine import Atom, ContextBase
from .dialogue import (
    AskBelief,
    AskFact,
    AskGoals,
    AskObjection,
    DialogueState,
    GoalsReply,
    LikertReply,
    Move,
    OfferGoal,
    OptionReply,
    UserReply,
    YesNoReply,
    apply_user_reply,
    new_session,
    next_system_move,
)
from .strategy import StrategyConfig
from .usermodel import AgreementLevel, Belief, Provenance, UserModel, record_goals


class PersonaError(ValueError):
    pass


class PersonaIncompleteError(PersonaError):
    """The dialogue asked a query the persona cannot answer."""


@dataclass(frozen=True)
class SeedBelief:
    value: float
    confidence: float


@dataclass(frozen=True)
class Persona:
    beliefs: Mapping[str, SeedBelief] = field(default_factory=dict)
    facts: frozenset[Atom] = frozenset()
    interests: frozenset[str] = frozenset()
    goals: frozenset[str] = frozenset()
    replies: Mapping[str, object] = field(default_factory=dict)


_PERSONA_KEYS = {"beliefs", "facts", "interests", "goals", "replies"}


def parse_persona(data: dict) -> Persona:
    if not isinstance(data, dict):
        raise PersonaError("persona file must be a JSON object")
    unknown = set(data) - _PERSONA_KEYS
    if unknown:
        raise PersonaError(f"unknown persona keys {sorted(unknown)}")
    beliefs = {}
    for arg_id, raw in data.get("beliefs", {}).items():
        if not isinstance(raw, dict) or set(raw) - {"value", "confidence"}:
            raise PersonaError(f"belief for {arg_id!r} must be {{value, confidence}}")
        beliefs[arg_id] = SeedBelief(float(raw["value"]), float(raw.get("confidence", 0.0)))
    facts = frozenset(Atom.parse(a) for a in data.get("facts", []))
    interests = frozenset(data.get("interests", []))
    goals = frozenset(data.get("goals", []))
    replies = dict(data.get("replies", {}))
    return Persona(beliefs=beliefs, facts=facts, interests=interests,
                   goals=goals, replies=replies)


def load_persona(path) -> Persona:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_persona(json.load(fh))


def seed_model(persona: Persona, graph: ArgumentGraph) -> UserModel:
    """The system-side user model a persona starts a dialogue with."""
    beliefs = {
        arg_id: Belief(sb.value, sb.confidence, Provenance.PRIOR)
        for arg_id, sb in persona.beliefs.items()
        if arg_id in graph
    }
    model = UserModel(
        beliefs=beliefs,
        context=ContextBase(facts=persona.facts),
        interests=persona.interests,
    )
    if persona.goals:
        model = record_goals(model, graph, persona.goals)
    return model


def _likert_from_value(value: float) -> AgreementLevel:
    # Midpoints between the fixed Likert->value table entries.
    if value >= 0.85:
        return AgreementLevel.STRONGLY_AGREE
    if value >= 0.625:
        return AgreementLevel.AGREE
    if value >= 0.375:
        return AgreementLevel.NEITHER
    if value >= 0.15:
        return AgreementLevel.DISAGREE
    return AgreementLevel.STRONGLY_DISAGREE


def _as_yes_no(raw: object, key: str) -> bool:
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, str) and raw.lower() in ("yes", "no"):
        return raw.lower() == "yes"
    raise PersonaError(f"reply for {key!r} must be yes/no, got {raw!r}")


def answer(persona: Persona, move: Move) -> UserReply:
    """The persona's reply to a pending query."""
    if isinstance(move, AskBelief):
        raw = persona.replies.get(move.id)
        if raw is not None:
            try:
                return LikertReply(AgreementLevel(str(raw)))
            except ValueError:
                raise PersonaError(f"bad agreement level {raw!r} for {move.id}") from None
        if move.id in persona.beliefs:
            return LikertReply(_likert_from_value(persona.beliefs[move.id].value))
        raise PersonaIncompleteError(f"no reply for belief query {move.id!r}")
    if isinstance(move, (AskObjection, OfferGoal)):
        raw = persona.replies.get(move.id)
        if raw is not None:
            return YesNoReply(_as_yes_no(raw, move.id))
        if move.id in persona.beliefs:
            return YesNoReply(persona.beliefs[move.id].value >= 0.5)
        raise PersonaIncompleteError(f"no reply for query {move.id!r}")
    if isinstance(move, AskGoals):
        raw = persona.replies.get("goals")
        if raw is not None:
            if not isinstance(raw, list):
                raise PersonaError("reply for 'goals' must be a list of ids")
            return GoalsReply(frozenset(raw))
        offered = {opt.id for opt in move.options}
        return GoalsReply(persona.goals & offered)
    if isinstance(move, AskFact):
        raw = persona.replies.get(move.query_id)
        if raw is None:
            raise PersonaIncompleteError(f"no reply for fact query {move.query_id!r}")
        if isinstance(raw, int) and not isinstance(raw, bool):
            return OptionReply(raw)
        for idx, opt in enumerate(move.options):
            if opt.label == raw:
                return OptionReply(idx)
        raise PersonaError(f"reply {raw!r} matches no option of {move.query_id!r}")
    raise PersonaError(f"not a query move: {move!r}")


def run_simulation(
    graph: ArgumentGraph,
    rules: ContextBase,
    persona: Persona,
    config: StrategyConfig | None = None,
) -> DialogueState:
    """Run a whole dialogue, answering every query from the persona."""
    state = new_session(graph, rules, seed_model(persona, graph), config)
    while state.outcome() is None:
        state, move = next_system_move(state)
        if state.pending is not None:
            state = apply_user_reply(state, answer(persona, move))
    return state
