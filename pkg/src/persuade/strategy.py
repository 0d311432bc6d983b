"""Deterministic move selection over (graph, user model, context).

The policy fixes one defensible resolution of the choices the source material
leaves open, in a strict order so golden transcripts stay meaningful:

  GOAL      pick the persuasion goal whose applicable neighbourhood scores
            best (supporter belief sum minus attacker belief sum); give up
            entirely when every goal scores below the abandon threshold.
  LEVERAGE  if a declared, believed user goal reaches the current goal by a
            support path of length <= 2, walk that path user-goal end first.
  PROBE     ask about attackers the model thinks the user believes
            (value > beta) but with low confidence (< tau).
  REBUT     counter a confirmed objection with an unposited attacker,
            preferring objective arguments, then topic relevance, then id;
            positing the counter discounts the objection.
  ELICIT    query remaining subjective neighbours of the goal.
  CLOSE     offer the goal.

All candidate sets are iterated in lexicographic id order; the planner is a
pure function of (state, config).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import topicindex
from .argmodel import (
    ArgumentGraph,
    FunctionalCategory,
    FunctionalType,
    Relation,
    attackers,
    goals,
    supporters,
)
from .contextengine import ContextBase, applicable
from .usermodel import UserModel

if TYPE_CHECKING:  # pragma: no cover - dialogue imports strategy
    from .dialogue import DialogueState, Move


class NotAPersuasionGoalError(Exception):
    pass


class InapplicableError(Exception):
    pass


class NoApplicableGoalError(Exception):
    pass


class TerminalStateError(Exception):
    pass


@dataclass(frozen=True)
class StrategyConfig:
    """Free parameters of the policy; the defaults match the test corpus."""

    lambda_: float = 0.5        # discount applied to a rebutted objection
    tau: float = 0.7            # confidence below which the system asks
    beta: float = 0.5           # belief at/above which an argument counts as believed
    theta_abandon: float = -2.0  # goal score below which the dialogue fails
    budget: int = 20            # maximum system moves per dialogue

    def __post_init__(self) -> None:
        for name in ("lambda_", "tau", "beta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} out of [0,1]: {v}")
        if self.budget < 1:
            raise ValueError(f"budget must be positive: {self.budget}")

    @classmethod
    def from_mapping(cls, data: dict) -> "StrategyConfig":
        known = {"lambda", "tau", "beta", "theta_abandon", "budget"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown strategy parameters: {sorted(unknown)}")
        kwargs: dict = {}
        if "lambda" in data:
            kwargs["lambda_"] = float(data["lambda"])
        for key in ("tau", "beta", "theta_abandon"):
            if key in data:
                kwargs[key] = float(data[key])
        if "budget" in data:
            kwargs["budget"] = int(data["budget"])
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "StrategyConfig":
        """Parse the key=value config-file format."""
        data: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            data[key] = value
        return cls.from_mapping(data)


@dataclass(frozen=True)
class GoalAssessment:
    goal: str
    score: float
    rank: int | None


def goal_score(
    graph: ArgumentGraph, model: UserModel, base: ContextBase, goal: str
) -> float:
    """Supporter-belief sum minus attacker-belief sum over applicable direct
    neighbours; arguments gated out by context contribute nothing."""
    if goal not in graph or graph.arguments[goal].functional is not FunctionalType.PERSUASION_GOAL:
        raise NotAPersuasionGoalError(goal)
    app = applicable(graph, base)
    if goal not in app:
        raise InapplicableError(goal)
    support = sum(model.value_of(s) for s in supporters(app, goal))
    attack = sum(model.value_of(a) for a in attackers(app, goal))
    return support - attack


def assess_goals(
    graph: ArgumentGraph,
    model: UserModel,
    base: ContextBase,
    exclude: frozenset[str] = frozenset(),
) -> list[GoalAssessment]:
    """Score every applicable persuasion goal outside `exclude`, best first.

    Ties break by lower rank number (unranked last), then id.
    """
    app = applicable(graph, base)
    assessments = [
        GoalAssessment(g, goal_score(graph, model, base, g), app.arguments[g].rank)
        for g in goals(app, FunctionalType.PERSUASION_GOAL)
        if g not in exclude
    ]
    assessments.sort(
        key=lambda a: (
            -a.score,
            a.rank is None,
            a.rank if a.rank is not None else 0,
            a.goal,
        )
    )
    return assessments


def select_goal(
    graph: ArgumentGraph,
    model: UserModel,
    base: ContextBase,
    config: StrategyConfig,
    exclude: frozenset[str] = frozenset(),
) -> str | None:
    """The best-scoring applicable persuasion goal, or None to abandon
    (every score below theta_abandon)."""
    assessments = assess_goals(graph, model, base, exclude)
    if not assessments:
        raise NoApplicableGoalError(graph.name)
    if all(a.score < config.theta_abandon for a in assessments):
        return None
    return assessments[0].goal


@dataclass(frozen=True)
class Decision:
    """A planned move plus the state effects the protocol must apply."""

    move: "Move"
    step: str                      # policy step that fired
    new_goal: str | None = None    # current goal to record
    rebutted: str | None = None    # confirmed objection to discount after the posit


def _posited_support_chain(
    app: ArgumentGraph, goal: str, posited: frozenset[str]
) -> set[str]:
    """Posited arguments from which support arcs reach the goal through
    posited arguments only."""
    chain: set[str] = set()
    frontier = {goal}
    while frontier:
        nxt: set[str] = set()
        for node in frontier:
            for s in supporters(app, node):
                if s in posited and s not in chain:
                    chain.add(s)
                    nxt.add(s)
        frontier = nxt
    return chain


def _probe_universe(
    app: ArgumentGraph, goal: str, posited: frozenset[str]
) -> set[str]:
    anchors = {goal} | _posited_support_chain(app, goal, posited)
    out: set[str] = set()
    for anchor in anchors:
        out |= attackers(app, anchor)
    return out


def plan(state: "DialogueState", config: StrategyConfig) -> Decision:
    """First applicable step of the ordered policy over the applicable subgraph."""
    from .dialogue import AskBelief, AskObjection, Close, OfferGoal, Outcome, SystemPosit

    if state.outcome() is not None:
        raise TerminalStateError("dialogue already closed")

    graph = state.graph
    model = state.model
    app = applicable(graph, model.context)

    # GOAL
    goal = state.current_goal
    new_goal: str | None = None
    if goal is None:
        selected = select_goal(graph, model, model.context, config, exclude=state.rejected_goals)
        if selected is None:
            return Decision(Close(Outcome.FAILED), step="goal")
        goal = selected
        new_goal = selected
        if selected not in state.posited:
            return Decision(
                SystemPosit(selected, app.arguments[selected].text),
                step="goal",
                new_goal=selected,
            )

    def decision(move, step, rebutted=None) -> Decision:
        return Decision(move, step=step, new_goal=new_goal, rebutted=rebutted)

    # LEVERAGE: declared, believed user goals with a support path of length <= 2.
    for g in sorted(model.declared_goals):
        if g not in app or model.value_of(g) < config.beta:
            continue
        paths: list[list[str]] = []
        if g in supporters(app, goal):
            paths.append([g])
        for mid in sorted(supporters(app, goal)):
            if mid != g and g in supporters(app, mid):
                paths.append([g, mid])
        for path in paths:
            for node in path:
                if node not in state.posited:
                    return decision(
                        SystemPosit(node, app.arguments[node].text), step="leverage"
                    )

    universe = _probe_universe(app, goal, state.posited)

    # PROBE: believed but low-confidence objections.
    for cand in sorted(universe):
        belief = model.belief_of(cand)
        if (
            belief.value > config.beta
            and belief.confidence < config.tau
            and cand not in state.queried
            and cand not in state.posited
        ):
            return decision(AskObjection(cand, app.arguments[cand].text), step="probe")

    # REBUT: counter a confirmed objection.
    for objection in sorted(universe):
        belief = model.belief_of(objection)
        if belief.value < config.beta or belief.confidence < config.tau:
            continue
        counters = [c for c in attackers(app, objection) if c not in state.posited]
        if not counters:
            continue
        counters.sort(
            key=lambda c: (
                app.arguments[c].functional.category is not FunctionalCategory.OBJECTIVE,
                -topicindex.topic_relevance(app.arguments[c], model.interests),
                c,
            )
        )
        chosen = counters[0]
        return decision(
            SystemPosit(chosen, app.arguments[chosen].text),
            step="rebut",
            rebutted=objection,
        )

    # ELICIT: unqueried subjective neighbours of the goal.
    neighbours = attackers(app, goal) | supporters(app, goal)
    for cand in sorted(neighbours):
        if (
            app.arguments[cand].functional.category is FunctionalCategory.SUBJECTIVE
            and model.belief_of(cand).confidence < config.tau
            and cand not in state.queried
        ):
            return decision(AskBelief(cand, app.arguments[cand].text), step="elicit")

    # CLOSE
    return decision(OfferGoal(goal, app.arguments[goal].text), step="close")


def plan_move(state: "DialogueState", config: StrategyConfig) -> "Move":
    """The next system move for a non-terminal state; pure and deterministic."""
    return plan(state, config).move
