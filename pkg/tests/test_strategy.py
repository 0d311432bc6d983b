"""Goal scoring, goal selection, and the ordered move policy."""

from __future__ import annotations

import pytest

from persuade.contextengine import ContextBase, applicable
from persuade.dialogue import (
    AskBelief,
    AskObjection,
    LikertReply,
    OfferGoal,
    SystemPosit,
    YesNoReply,
    apply_user_reply,
    new_session,
    next_system_move,
)
from persuade.usermodel import AgreementLevel
from persuade.strategy import (
    InapplicableError,
    NoApplicableGoalError,
    NotAPersuasionGoalError,
    StrategyConfig,
    goal_score,
    plan_move,
    select_goal,
)
from persuade.usermodel import Belief, UserModel, record_goals


def model_with(graph, beliefs=None, goals=(), interests=()):
    model = UserModel(
        beliefs={k: Belief(*v) for k, v in (beliefs or {}).items()},
        interests=frozenset(interests),
    )
    if goals:
        model = record_goals(model, graph, goals)
    return model


class TestConfig:
    def test_defaults(self):
        c = StrategyConfig()
        assert (c.lambda_, c.tau, c.beta, c.theta_abandon, c.budget) == (0.5, 0.7, 0.5, -2.0, 20)

    def test_key_value_file_format(self):
        c = StrategyConfig.from_text("lambda = 0.3\ntau=0.9\n# comment\nbudget = 5\n")
        assert (c.lambda_, c.tau, c.budget) == (0.3, 0.9, 5)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            StrategyConfig(tau=1.5)
        with pytest.raises(ValueError):
            StrategyConfig.from_mapping({"volume": 11})


class TestGoalScore:
    def test_pr2_belief_tips_towards_running_goal(self, office_graph):
        model = model_with(office_graph, {"pr2": (0.95, 1.0)})
        base = ContextBase()
        assert goal_score(office_graph, model, base, "pg2") > goal_score(
            office_graph, model, base, "pg1"
        )

    def test_isolated_goal_scores_zero(self, walking):
        model = UserModel()
        assert goal_score(walking.graph, model, ContextBase(), "walk5km") == 0.0

    def test_symmetric_neighbours_cancel(self, office_graph):
        # pg1: make every neighbour belief equal; supporters 6, attackers 4.
        model = model_with(office_graph, {})
        score = goal_score(office_graph, model, ContextBase(), "pg1")
        assert score == pytest.approx(0.5 * 6 - 0.5 * 4)

    def test_not_a_persuasion_goal(self, office_graph):
        with pytest.raises(NotAPersuasionGoalError):
            goal_score(office_graph, UserModel(), ContextBase(), "s1")

    def test_inapplicable_goal(self):
        from persuade.corpus import load_corpus_entry

        cervical = load_corpus_entry("cervical-screening")
        with pytest.raises(InapplicableError):
            goal_score(cervical.graph, UserModel(), cervical.rules, "pg")


class TestSelectGoal:
    def test_office_walkthrough_selects_running_goal(self, office_graph):
        model = model_with(office_graph, {"pr2": (0.95, 1.0)})
        assert select_goal(office_graph, model, ContextBase(), StrategyConfig()) == "pg2"

    def test_walking_attacker_forces_fallback(self, walking):
        model = model_with(walking.graph, {"never-walked": (0.95, 1.0)})
        assert select_goal(walking.graph, model, ContextBase(), StrategyConfig()) == "walk5km"

    def test_walking_without_attacker_prefers_rank_one(self, walking):
        pruned = walking.graph.subgraph(set(walking.graph.arguments) - {"never-walked"})
        assert select_goal(pruned, UserModel(), ContextBase(), StrategyConfig()) == "walk10km"

    def test_rank_breaks_score_ties(self):
        from persuade.argmodel import Argument, ArgumentGraph, FunctionalType, OntologicalKind, OntologicalType

        def goal(i, rank):
            return Argument(i, f"goal {i}", frozenset({OntologicalType(OntologicalKind.COMMITMENT)}),
                            FunctionalType.PERSUASION_GOAL, rank=rank)

        g = ArgumentGraph("ties", {"pgA": goal("pgA", 2), "pgB": goal("pgB", 1)})
        assert select_goal(g, UserModel(), ContextBase(), StrategyConfig()) == "pgB"

    def test_default_beliefs_still_penalize_attacked_goal(self, walking):
        # never-walked sits at the 0.5 prior, so walk10km scores -0.5 and the
        # rank-2 goal wins even before any query.
        assert select_goal(walking.graph, UserModel(), ContextBase(), StrategyConfig()) == "walk5km"

    def test_abandon_when_every_score_below_threshold(self, walking):
        model = model_with(walking.graph, {"never-walked": (0.95, 1.0)})
        config = StrategyConfig(theta_abandon=0.5)
        assert select_goal(walking.graph, model, ContextBase(), config, exclude=frozenset({"walk5km", "walk2km", "walk1km"})) is None

    def test_no_applicable_goal(self, office_graph):
        with pytest.raises(NoApplicableGoalError):
            select_goal(
                office_graph, UserModel(), ContextBase(), StrategyConfig(),
                exclude=frozenset({"pg1", "pg2"}),
            )


def walkthrough_state(entry):
    """The seeded state the strategy walkthrough starts from."""
    model = model_with(
        entry.graph,
        {"pr2": (0.95, 1.0), "a0": (0.6, 0.3), "a3": (0.6, 0.3)},
        goals={"c4"},
    )
    return new_session(entry.graph, entry.rules, model, StrategyConfig())


class TestPlanMove:
    def test_fresh_default_state_posits_top_goal(self, office):
        state = new_session(office.graph, office.rules, UserModel(), StrategyConfig())
        move = plan_move(state, state.config)
        assert isinstance(move, SystemPosit)
        # With flat beliefs pg1 has 6 supporters / 4 attackers vs pg2's 7/6.
        assert move.id == "pg1"

    def test_walkthrough_opening_sequence(self, office):
        state = walkthrough_state(office)
        seen = []
        for _ in range(5):
            state, move = next_system_move(state)
            seen.append(move)
            if state.pending is not None:
                if isinstance(move, AskObjection) and move.id == "a0":
                    state = apply_user_reply(state, YesNoReply(False))
                elif isinstance(move, AskObjection) and move.id == "a3":
                    state = apply_user_reply(state, YesNoReply(True))
        kinds = [(type(m).__name__, getattr(m, "id", None)) for m in seen]
        assert kinds == [
            ("SystemPosit", "pg2"),
            ("SystemPosit", "c4"),
            ("SystemPosit", "s3"),
            ("AskObjection", "a0"),
            ("AskObjection", "a3"),
        ]
        state, move = next_system_move(state)
        assert move == SystemPosit("b3", office.graph.arguments["b3"].text)
        # Rebutting discounts the confirmed objection: 0.75 * (1 - 0.5*0.5).
        assert state.model.value_of("a3") == pytest.approx(0.5625)

    def test_all_steps_exhausted_offers_goal(self, walking):
        pruned = walking.graph.subgraph(set(walking.graph.arguments) - {"never-walked"})
        state = new_session(pruned, ContextBase(), UserModel(), StrategyConfig())
        state, first = next_system_move(state)
        assert first == SystemPosit("walk10km", pruned.arguments["walk10km"].text)
        state, second = next_system_move(state)
        assert isinstance(second, OfferGoal) and second.id == "walk10km"

    def test_elicit_queries_subjective_neighbours_only(self, office):
        state = walkthrough_state(office)
        asked = []
        while state.outcome() is None:
            state, move = next_system_move(state)
            if isinstance(move, AskBelief):
                category = office.graph.arguments[move.id].functional.category.value
                assert category == "subjective"
                asked.append(move.id)
                state = apply_user_reply(state, LikertReply(AgreementLevel.DISAGREE))
            elif isinstance(move, AskObjection):
                state = apply_user_reply(state, YesNoReply(False))
            elif isinstance(move, OfferGoal):
                state = apply_user_reply(state, YesNoReply(True))
        assert "a1" in asked and "b0" not in asked and "b3" not in asked

    def test_context_gated_arguments_never_move(self):
        from persuade.corpus import load_corpus_entry
        from persuade.contextengine import Atom

        women = load_corpus_entry("women-in-sport")
        base = ContextBase(facts=frozenset({Atom.parse("gender(female)")}))
        app = applicable(women.graph, women.rules.with_facts(base.facts))
        assert "c4a" not in app and "c5a" not in app  # no initiative atom
        model = UserModel(context=base)
        state = new_session(women.graph, women.rules, model, StrategyConfig(budget=40))
        while state.outcome() is None:
            state, move = next_system_move(state)
            target = getattr(move, "id", None)
            assert target not in ("c4a", "c5a")
            if state.pending is not None:
                state = apply_user_reply(
                    state,
                    LikertReply(AgreementLevel.DISAGREE)
                    if isinstance(move, AskBelief)
                    else YesNoReply(False),
                )
