"""The asymmetric dialogue protocol.

The system freely posits arguments and asks menu questions; the user only
answers the pending question. Every session move is appended to an ordered
transcript, and folding the transcript over the seed model reproduces the
final state exactly - that replay property is the persistence contract the
service layer builds on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Union

from . import strategy as strategy_mod
from .argmodel import (
    ArgumentGraph,
    FunctionalCategory,
    FunctionalType,
    validate,
)
from .contextengine import Atom, ContextBase, applicable
from .usermodel import (
    AgreementLevel,
    Belief,
    Provenance,
    UserModel,
    record_agreement,
    record_fact,
    record_goals,
    discount_after_attack,
)
from .strategy import StrategyConfig


class DialogueError(Exception):
    pass


class InvalidGraphError(DialogueError):
    pass


class NoApplicableGoalError(DialogueError):
    pass


class PendingReplyError(DialogueError):
    pass


class TerminalSessionError(DialogueError):
    pass


class NoPendingError(DialogueError):
    pass


class ReplyShapeMismatchError(DialogueError):
    pass


class UnknownOptionError(DialogueError):
    pass


class ProtocolError(DialogueError):
    """Internal legality breach (repeat posit, illegal ask); a planner bug."""


class ReplayError(DialogueError):
    """A stored transcript does not fold back onto the engine's behaviour."""


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------

ACTOR_SYSTEM = "APS"
ACTOR_USER = "User"

LIKERT_OPTIONS: tuple[str, ...] = (
    "Strongly agree",
    "Agree",
    "Neither agree nor disagree",
    "Disagree",
    "Strongly disagree",
)

LIKERT_LEVELS: tuple[AgreementLevel, ...] = (
    AgreementLevel.STRONGLY_AGREE,
    AgreementLevel.AGREE,
    AgreementLevel.NEITHER,
    AgreementLevel.DISAGREE,
    AgreementLevel.STRONGLY_DISAGREE,
)

YES_NO_OPTIONS: tuple[str, ...] = ("Yes", "No")


class Outcome(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    FAILED = "failed"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class SystemPosit:
    id: str
    text: str


@dataclass(frozen=True)
class AskBelief:
    """Five-point agreement menu; only subjective arguments may be asked."""

    id: str
    text: str


@dataclass(frozen=True)
class FactOption:
    label: str
    atom: Atom


@dataclass(frozen=True)
class AskFact:
    query_id: str
    prompt: str
    options: tuple[FactOption, ...]


@dataclass(frozen=True)
class GoalOption:
    id: str
    text: str


@dataclass(frozen=True)
class AskGoals:
    options: tuple[GoalOption, ...]


@dataclass(frozen=True)
class AskObjection:
    """Yes/no: is this argument a reason not to accept the goal?"""

    id: str
    text: str


@dataclass(frozen=True)
class OfferGoal:
    id: str
    text: str


@dataclass(frozen=True)
class Close:
    outcome: Outcome


@dataclass(frozen=True)
class LikertReply:
    level: AgreementLevel


@dataclass(frozen=True)
class OptionReply:
    option: int


@dataclass(frozen=True)
class GoalsReply:
    ids: frozenset[str]


@dataclass(frozen=True)
class YesNoReply:
    accept: bool


UserReply = Union[LikertReply, OptionReply, GoalsReply, YesNoReply]
Move = Union[SystemPosit, AskBelief, AskFact, AskGoals, AskObjection, OfferGoal, Close, UserReply]

_QUERY_MOVES = (AskBelief, AskFact, AskGoals, AskObjection, OfferGoal)
_REPLY_SHAPE: dict[type, type] = {
    AskBelief: LikertReply,
    AskFact: OptionReply,
    AskGoals: GoalsReply,
    AskObjection: YesNoReply,
    OfferGoal: YesNoReply,
}


@dataclass(frozen=True)
class TranscriptEntry:
    step: int
    actor: str
    move: Move


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DialogueState:
    graph: ArgumentGraph
    model: UserModel
    config: StrategyConfig
    current_goal: str | None = None
    posited: frozenset[str] = frozenset()
    queried: frozenset[str] = frozenset()
    rejected_goals: frozenset[str] = frozenset()
    pending: Move | None = None
    transcript: tuple[TranscriptEntry, ...] = ()
    system_moves_used: int = 0

    @property
    def base(self) -> ContextBase:
        """The live context base (intake facts plus rules plus recorded facts)."""
        return self.model.context

    @property
    def pending_step(self) -> int | None:
        if self.pending is None:
            return None
        return self.transcript[-1].step

    def outcome(self) -> Outcome | None:
        if self.transcript and isinstance(self.transcript[-1].move, Close):
            return self.transcript[-1].move.outcome
        return None


def is_terminal(state: DialogueState) -> Outcome | None:
    """The closing outcome, or None while the dialogue is still open."""
    return state.outcome()


def new_session(
    graph: ArgumentGraph,
    base: ContextBase,
    seed_model: UserModel | None = None,
    config: StrategyConfig | None = None,
) -> DialogueState:
    """A fresh state: empty transcript, no current goal, full budget.

    The seed model's own facts/rules merge with the supplied base.
    """
    violations = validate(graph)
    if violations:
        raise InvalidGraphError("; ".join(str(v) for v in violations[:5]))
    model = seed_model if seed_model is not None else UserModel()
    merged = ContextBase(
        facts=base.facts | model.context.facts,
        rules=base.rules | model.context.rules,
    )
    model = replace(model, context=merged)
    app = applicable(graph, merged)
    if not any(
        a.functional is FunctionalType.PERSUASION_GOAL for a in app.arguments.values()
    ):
        raise NoApplicableGoalError(graph.name)
    if config is None:
        config = StrategyConfig()
    return DialogueState(graph=graph, model=model, config=config)


def _append(
    state: DialogueState, actor: str, move: Move, **changes
) -> DialogueState:
    entry = TranscriptEntry(step=len(state.transcript) + 1, actor=actor, move=move)
    return replace(state, transcript=state.transcript + (entry,), **changes)


def next_system_move(state: DialogueState) -> tuple[DialogueState, Move]:
    """Advance by one system move (posit, query, offer, or close)."""
    if state.outcome() is not None:
        raise TerminalSessionError("dialogue already closed")
    if state.pending is not None:
        raise PendingReplyError("a user reply is pending")

    if state.system_moves_used >= state.config.budget:
        move: Move = Close(Outcome.BUDGET_EXHAUSTED)
        return _append(state, ACTOR_SYSTEM, move), move

    decision = strategy_mod.plan(state, state.config)
    move = decision.move
    changes: dict = {}
    if decision.new_goal is not None:
        changes["current_goal"] = decision.new_goal

    if isinstance(move, Close):
        return _append(state, ACTOR_SYSTEM, move, **changes), move

    app = applicable(state.graph, state.model.context)
    if isinstance(move, SystemPosit):
        if move.id in state.posited:
            raise ProtocolError(f"repeat posit {move.id}")
        if move.id not in app:
            raise ProtocolError(f"posit of inapplicable argument {move.id}")
        changes["posited"] = state.posited | {move.id}
        if decision.rebutted is not None:
            changes["model"] = discount_after_attack(
                state.model, state.graph, decision.rebutted, move.id, state.config.lambda_
            )
    elif isinstance(move, (AskBelief, AskObjection)):
        if move.id not in app:
            raise ProtocolError(f"query about inapplicable argument {move.id}")
        if isinstance(move, AskBelief) and (
            state.graph.arguments[move.id].functional.category
            is not FunctionalCategory.SUBJECTIVE
        ):
            raise ProtocolError(f"belief query on non-subjective argument {move.id}")
        changes["queried"] = state.queried | {move.id}
        changes["pending"] = move
    elif isinstance(move, _QUERY_MOVES):
        changes["pending"] = move

    changes["system_moves_used"] = state.system_moves_used + 1
    return _append(state, ACTOR_SYSTEM, move, **changes), move


def apply_user_reply(state: DialogueState, reply: UserReply) -> DialogueState:
    """Fold the user's answer to the pending query into the state."""
    pending = state.pending
    if pending is None:
        raise NoPendingError("no query awaiting a reply")
    expected = _REPLY_SHAPE[type(pending)]
    if not isinstance(reply, expected):
        raise ReplyShapeMismatchError(
            f"{type(pending).__name__} expects {expected.__name__}, got {type(reply).__name__}"
        )

    model = state.model
    changes: dict = {"pending": None}

    if isinstance(pending, AskBelief):
        model = record_agreement(model, state.graph, pending.id, reply.level)
    elif isinstance(pending, AskFact):
        if not 0 <= reply.option < len(pending.options):
            raise UnknownOptionError(f"option {reply.option} out of range")
        model = record_fact(model, pending.options[reply.option].atom)
    elif isinstance(pending, AskGoals):
        offered = {opt.id for opt in pending.options}
        unknown = set(reply.ids) - offered
        if unknown:
            raise UnknownOptionError(f"goals not offered: {sorted(unknown)}")
        model = record_goals(model, state.graph, reply.ids)
    elif isinstance(pending, AskObjection):
        level = AgreementLevel.AGREE if reply.accept else AgreementLevel.DISAGREE
        model = record_agreement(model, state.graph, pending.id, level)

    changes["model"] = model
    state = _append(state, ACTOR_USER, reply, **changes)

    if isinstance(pending, OfferGoal):
        if reply.accept:
            state = _append(state, ACTOR_SYSTEM, Close(Outcome.ACCEPTED))
        else:
            model = state.model._with_belief(
                pending.id, Belief(0.05, 1.0, Provenance.QUERIED)
            )
            rejected = state.rejected_goals | {pending.id}
            state = replace(state, model=model, rejected_goals=rejected)
            app = applicable(state.graph, model.context)
            untried = [
                a.id
                for a in app.arguments.values()
                if a.functional is FunctionalType.PERSUASION_GOAL and a.id not in rejected
            ]
            if untried:
                state = replace(state, current_goal=None)
            else:
                state = _append(state, ACTOR_SYSTEM, Close(Outcome.REJECTED))
    return state


# ---------------------------------------------------------------------------
# Transcript serialization: one JSON object per line, stable field order.
# ---------------------------------------------------------------------------

def move_to_json(move: Move) -> dict:
    if isinstance(move, SystemPosit):
        return {"type": "system-posit", "id": move.id, "text": move.text}
    if isinstance(move, AskBelief):
        return {
            "type": "ask-belief",
            "id": move.id,
            "text": move.text,
            "options": list(LIKERT_OPTIONS),
        }
    if isinstance(move, AskFact):
        return {
            "type": "ask-fact",
            "query_id": move.query_id,
            "prompt": move.prompt,
            "options": [{"label": o.label, "atom": str(o.atom)} for o in move.options],
        }
    if isinstance(move, AskGoals):
        return {
            "type": "ask-goals",
            "options": [{"id": o.id, "text": o.text} for o in move.options],
        }
    if isinstance(move, AskObjection):
        return {
            "type": "ask-objection",
            "id": move.id,
            "text": move.text,
            "options": list(YES_NO_OPTIONS),
        }
    if isinstance(move, OfferGoal):
        return {
            "type": "offer-goal",
            "id": move.id,
            "text": move.text,
            "options": list(YES_NO_OPTIONS),
        }
    if isinstance(move, Close):
        return {"type": "close", "outcome": move.outcome.value}
    if isinstance(move, LikertReply):
        return {"type": "user-reply", "payload": {"level": move.level.value}}
    if isinstance(move, OptionReply):
        return {"type": "user-reply", "payload": {"option": move.option}}
    if isinstance(move, GoalsReply):
        return {"type": "user-reply", "payload": {"ids": sorted(move.ids)}}
    if isinstance(move, YesNoReply):
        return {"type": "user-reply", "payload": {"accept": move.accept}}
    raise TypeError(f"not a move: {move!r}")


def reply_from_payload(payload: dict) -> UserReply:
    """Decode a user-reply payload ({level}|{option}|{ids}|{accept})."""
    if not isinstance(payload, dict) or len(payload) != 1:
        raise ReplyShapeMismatchError(f"bad reply payload: {payload!r}")
    if "level" in payload:
        try:
            return LikertReply(AgreementLevel(payload["level"]))
        except ValueError:
            raise UnknownOptionError(f"unknown agreement level {payload['level']!r}") from None
    if "option" in payload:
        if not isinstance(payload["option"], int) or isinstance(payload["option"], bool):
            raise ReplyShapeMismatchError("'option' must be an integer index")
        return OptionReply(payload["option"])
    if "ids" in payload:
        ids = payload["ids"]
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise ReplyShapeMismatchError("'ids' must be a list of argument ids")
        return GoalsReply(frozenset(ids))
    if "accept" in payload:
        if not isinstance(payload["accept"], bool):
            raise ReplyShapeMismatchError("'accept' must be a boolean")
        return YesNoReply(payload["accept"])
    raise ReplyShapeMismatchError(f"bad reply payload: {payload!r}")


def move_from_json(data: dict) -> Move:
    kind = data.get("type")
    if kind == "system-posit":
        return SystemPosit(data["id"], data["text"])
    if kind == "ask-belief":
        return AskBelief(data["id"], data["text"])
    if kind == "ask-fact":
        return AskFact(
            data["query_id"],
            data["prompt"],
            tuple(FactOption(o["label"], Atom.parse(o["atom"])) for o in data["options"]),
        )
    if kind == "ask-goals":
        return AskGoals(tuple(GoalOption(o["id"], o["text"]) for o in data["options"]))
    if kind == "ask-objection":
        return AskObjection(data["id"], data["text"])
    if kind == "offer-goal":
        return OfferGoal(data["id"], data["text"])
    if kind == "close":
        return Close(Outcome(data["outcome"]))
    if kind == "user-reply":
        return reply_from_payload(data["payload"])
    raise ReplayError(f"unknown move type {kind!r}")


def entry_to_json(entry: TranscriptEntry) -> dict:
    return {"step": entry.step, "actor": entry.actor, "move": move_to_json(entry.move)}


def entry_from_json(data: dict) -> TranscriptEntry:
    return TranscriptEntry(
        step=int(data["step"]),
        actor=str(data["actor"]),
        move=move_from_json(data["move"]),
    )


def render_entry(entry: TranscriptEntry) -> str:
    return json.dumps(entry_to_json(entry), separators=(",", ":"), ensure_ascii=True)


def render_transcript(entries: Iterable[TranscriptEntry]) -> str:
    return "".join(render_entry(e) + "\n" for e in entries)


def parse_transcript(text: str) -> tuple[TranscriptEntry, ...]:
    entries = []
    for line in text.splitlines():
        if line.strip():
            entries.append(entry_from_json(json.loads(line)))
    return tuple(entries)


def replay_transcript(
    graph: ArgumentGraph,
    base: ContextBase,
    seed_model: UserModel | None,
    config: StrategyConfig,
    entries: Iterable[TranscriptEntry],
) -> DialogueState:
    """Rebuild the state a recorded transcript left behind.

    System moves are regenerated through the engine and must match the
    recording move for move (the strategy is deterministic); a mismatch means
    the log does not belong to this seed and raises ReplayError. The replayed
    state may extend the log by trailing Close entries only: a crash can cut
    the log between a final user reply and the Close that reply implies.
    """
    state = new_session(graph, base, seed_model, config)
    entries = tuple(entries)
    idx = 0
    while idx < len(entries):
        entry = entries[idx]
        if entry.step <= len(state.transcript):
            # Already appended by a previous apply_user_reply (Close entries).
            if state.transcript[entry.step - 1] != entry:
                raise ReplayError(f"step {entry.step}: log disagrees with engine")
            idx += 1
            continue
        if entry.actor == ACTOR_SYSTEM:
            state, move = next_system_move(state)
            if state.transcript[-1] != entry:
                raise ReplayError(
                    f"step {entry.step}: engine produced {move}, log has {entry.move}"
                )
        elif entry.actor == ACTOR_USER:
            if not isinstance(
                entry.move, (LikertReply, OptionReply, GoalsReply, YesNoReply)
            ):
                raise ReplayError(f"step {entry.step}: user entry is not a reply")
            state = apply_user_reply(state, entry.move)
            if state.transcript[entry.step - 1] != entry:
                raise ReplayError(f"step {entry.step}: reply disagrees with log")
        else:
            raise ReplayError(f"step {entry.step}: unknown actor {entry.actor!r}")
        idx += 1
    if state.transcript[: len(entries)] != entries:
        raise ReplayError("replayed transcript differs from the log")
    for extra in state.transcript[len(entries):]:
        if not isinstance(extra.move, Close):
            raise ReplayError("replay added a non-Close entry beyond the log")
    return state
