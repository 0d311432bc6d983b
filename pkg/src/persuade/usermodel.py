"""The system's model of the persuadee.

Per-argument belief is a probability-like value in [0, 1] paired with the
system's own confidence in that estimate: "the user believes a0" (value 0.6)
and "but we are not sure" (confidence 0.3) are separate axes. Queries drive
confidence to 1; unseen arguments sit at the neutral prior (0.5, 0.0).

Models are immutable values: every update returns a new model, which is what
makes transcripts replayable over a seed model.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping

from .argmodel import (
    ArgumentGraph,
    Arc,
    FunctionalType,
    Relation,
    UnknownArgumentError,
)
from .contextengine import Atom, ContextBase


class NotAUserGoalError(Exception):
    pass


class NoSuchAttackError(Exception):
    pass


class AgreementLevel(str, Enum):
    STRONGLY_AGREE = "strongly-agree"
    AGREE = "agree"
    NEITHER = "neither"
    DISAGREE = "disagree"
    STRONGLY_DISAGREE = "strongly-disagree"


# Fixed Likert -> belief table. Symmetric around 0.5 with 0.95/0.05 endpoints
# so no argument is ever treated as certainly settled.
AGREEMENT_VALUE: dict[AgreementLevel, float] = {
    AgreementLevel.STRONGLY_AGREE: 0.95,
    AgreementLevel.AGREE: 0.75,
    AgreementLevel.NEITHER: 0.5,
    AgreementLevel.DISAGREE: 0.25,
    AgreementLevel.STRONGLY_DISAGREE: 0.05,
}


class Provenance(str, Enum):
    PRIOR = "prior"
    QUERIED = "queried"
    INFERRED = "inferred"


@dataclass(frozen=True)
class Belief:
    value: float
    confidence: float
    provenance: Provenance = Provenance.PRIOR

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"belief value out of [0,1]: {self.value}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"belief confidence out of [0,1]: {self.confidence}")


DEFAULT_BELIEF = Belief(0.5, 0.0, Provenance.PRIOR)


@dataclass(frozen=True)
class UserModel:
    beliefs: Mapping[str, Belief] = field(default_factory=dict)
    context: ContextBase = ContextBase()
    interests: frozenset[str] = frozenset()
    declared_goals: frozenset[str] = frozenset()

    def belief_of(self, arg_id: str) -> Belief:
        return self.beliefs.get(arg_id, DEFAULT_BELIEF)

    def value_of(self, arg_id: str) -> float:
        return self.belief_of(arg_id).value

    def _with_belief(self, arg_id: str, belief: Belief) -> "UserModel":
        beliefs = dict(self.beliefs)
        beliefs[arg_id] = belief
        return replace(self, beliefs=beliefs)


def record_agreement(
    model: UserModel, graph: ArgumentGraph, arg_id: str, level: AgreementLevel
) -> UserModel:
    """Store a menu answer about arg_id; all other beliefs untouched."""
    if arg_id not in graph:
        raise UnknownArgumentError(arg_id)
    return model._with_belief(
        arg_id, Belief(AGREEMENT_VALUE[level], 1.0, Provenance.QUERIED)
    )


def record_fact(model: UserModel, atom: Atom) -> UserModel:
    """Add a situation fact (idempotent); the context closure may grow."""
    return replace(model, context=model.context.with_facts([atom]))


def record_goals(model: UserModel, graph: ArgumentGraph, ids: Iterable[str]) -> UserModel:
    """Mark user-goal arguments as declared; a declared goal is also believed."""
    ids = frozenset(ids)
    for arg_id in sorted(ids):
        if arg_id not in graph:
            raise UnknownArgumentError(arg_id)
        if graph.arguments[arg_id].functional is not FunctionalType.USER_GOAL:
            raise NotAUserGoalError(arg_id)
    beliefs = dict(model.beliefs)
    for arg_id in ids:
        beliefs[arg_id] = Belief(0.95, 1.0, Provenance.QUERIED)
    return replace(model, beliefs=beliefs, declared_goals=model.declared_goals | ids)


def discount_after_attack(
    model: UserModel,
    graph: ArgumentGraph,
    target: str,
    attacker: str,
    discount: float,
) -> UserModel:
    """Lower belief in `target` after positing `attacker` against it.

    value(target) <- value(target) * (1 - discount * value(attacker)); the
    confidence is unchanged, the provenance becomes Inferred. Requires an
    actual attack arc attacker -> target.
    """
    if not 0.0 <= discount <= 1.0:
        raise ValueError(f"discount out of [0,1]: {discount}")
    if target not in graph:
        raise UnknownArgumentError(target)
    if attacker not in graph:
        raise UnknownArgumentError(attacker)
    if Arc(attacker, target, Relation.ATTACK) not in graph.arcs:
        raise NoSuchAttackError(f"{attacker} does not attack {target}")
    old = model.belief_of(target)
    new_value = old.value * (1.0 - discount * model.value_of(attacker))
    new_value = min(1.0, max(0.0, new_value))
    return model._with_belief(
        target, Belief(new_value, old.confidence, Provenance.INFERRED)
    )
