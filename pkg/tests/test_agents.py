"""Agent loop behavior: profiling, memory bounds, phase stepping, interrupts."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from ideateam.agents import (
    AdjacencyViolationError,
    AgentState,
    EvaluationTrigger,
    FeedbackClosedTrigger,
    apply_reflection,
    enqueue_request,
)
from ideateam.engine import HumanGenerateIdea, HumanRequest, start_session
from ideateam.events import AgentPhase, PhaseChanged, RequestFulfilled
from ideateam.ideas import Evaluation
from ideateam.memory import ActionRecord, RequestItem, ShortTermMemory, record_action
from ideateam.pipelines import ReflectionDelta
from ideateam.profiles import build_profile_prompt, team_context_for
from ideateam.providers import MockProvider
from ideateam.team import Persona, RoleKind, SharedMentalModel, SocialIdentity

from conftest import rich_config


def fresh_session(time_scale: float = 0.0, seed: int = 11):
    config = rich_config()
    return start_session(config, MockProvider(seed=seed), seed=seed, time_scale=time_scale)


def open_gate(session):
    """Human drops the first idea so the gate opens deterministically."""
    outcome = session.submit_human_action(
        HumanGenerateIdea(
            title="Seed", object="Seed object", function="Seed function",
            behavior="Seed behavior", structure="Seed structure",
        )
    )
    assert outcome.ok
    return outcome.events[0].idea.idea_id


class TestProfilePrompt:
    def test_omitted_attributes_produce_no_text(self):
        persona = Persona(name="Quinn", social=SocialIdentity(occupation="UX designer"))
        config = rich_config()
        context = team_context_for(config, "ada")
        prompt = build_profile_prompt(persona, SharedMentalModel(), context)
        assert "UX designer" in prompt
        assert "year-old" not in prompt
        assert "identify as" not in prompt
        assert "education" not in prompt.lower()

    def test_smm_embedded_verbatim(self):
        config = rich_config()
        prompt = build_profile_prompt(
            config.member("ada").persona, config.smm, team_context_for(config, "ada")
        )
        assert "Focus on IoT-based services" in prompt
        assert "Challenge each other's assumptions early." in prompt

    def test_pure_function(self):
        config = rich_config()
        args = (config.member("ada").persona, config.smm, team_context_for(config, "ada"))
        assert build_profile_prompt(*args) == build_profile_prompt(*args)

    def test_roles_and_neighbors_stated(self):
        config = rich_config()
        prompt = build_profile_prompt(
            config.member("ada").persona, config.smm, team_context_for(config, "ada")
        )
        assert "idea_generation" in prompt
        assert "[user]" in prompt and "your superior" in prompt
        assert "[cyd]" in prompt and "a peer" in prompt


class TestShortTermMemory:
    def test_ring_evicts_oldest_beyond_five(self):
        stm = ShortTermMemory()
        for n in range(6):
            record_action(stm, ActionRecord(at=float(n), kind="k", detail=f"d{n}"))
        assert len(stm.recent_actions) == 5
        assert [r.detail for r in stm.recent_actions] == ["d1", "d2", "d3", "d4", "d5"]

    def test_single_record(self):
        stm = ShortTermMemory()
        record_action(stm, ActionRecord(at=0.0, kind="k", detail="only"))
        assert len(stm.recent_actions) == 1

    @given(st.integers(min_value=0, max_value=40))
    @settings(max_examples=40, deadline=None)
    def test_bound_holds_for_any_count(self, count):
        stm = ShortTermMemory()
        for n in range(count):
            record_action(stm, ActionRecord(at=float(n), kind="k", detail=str(n)))
        assert len(stm.recent_actions) == min(count, 5)
        if count > 5:
            assert [r.detail for r in stm.recent_actions] == [str(n) for n in range(count - 5, count)]


class TestEnqueueRequest:
    def test_fifo_order(self):
        session = fresh_session()
        agent = session.agents["ada"]
        enqueue_request(agent, RequestItem("r1", "user", RoleKind.IDEA_GENERATION, "one"), session.config)
        enqueue_request(agent, RequestItem("r2", "cyd", RoleKind.IDEA_GENERATION, "two"), session.config)
        assert [r.ref for r in agent.stm.pending_requests] == ["r1", "r2"]

    def test_non_adjacent_requester_rejected(self):
        session = fresh_session()
        # ben and ADA are adjacent, but "ghost" is not a neighbor of ada
        with pytest.raises(AdjacencyViolationError):
            enqueue_request(
                session.agents["ada"],
                RequestItem("r1", "ghost", RoleKind.FEEDBACK, "x"),
                session.config,
            )


class TestTick:
    def test_request_during_wait_interrupts_to_act(self):
        session = fresh_session(time_scale=1000.0)
        open_gate(session)
        agent = session.agents["ada"]
        agent.phase = AgentPhase.WAIT
        agent.wait_deadline = 10_000.0
        before = len(session.log)
        outcome = session.submit_human_action(
            HumanRequest(recipient="ada", action="idea_generation", text="explore IoT")
        )
        assert outcome.ok
        session.step()
        tail = session.log[before:]
        act_changes = [
            e for e in tail
            if isinstance(e, PhaseChanged) and e.member == "ada" and e.phase is AgentPhase.ACT
        ]
        assert act_changes, "request should wake the waiting agent into Act"

    def test_fulfilled_in_arrival_order(self):
        session = fresh_session(time_scale=1000.0)
        open_gate(session)
        agent = session.agents["ada"]
        agent.phase = AgentPhase.WAIT
        agent.wait_deadline = 10_000.0
        session.submit_human_action(HumanRequest(recipient="ada", action="idea_generation", text="first"))
        session.submit_human_action(HumanRequest(recipient="ada", action="feedback", text="second"))
        refs = [r.ref for r in agent.stm.pending_requests]
        for _ in range(8):
            session.step()
        fulfilled = [e.request_ref for e in session.log if isinstance(e, RequestFulfilled)]
        assert fulfilled[:2] == refs

    def test_gating_forces_wait_for_pure_evaluator(self):
        session = fresh_session(time_scale=1000.0)
        ben = session.agents["ben"]  # evaluation + request roles, no generation
        provider = session.provider
        calls_before = len(provider.recorded)
        session.step()
        assert ben.phase is AgentPhase.WAIT
        # No pipeline call was needed: there were no legal options at all.
        ben_calls = [
            r for r in provider.recorded[calls_before:] if r.system_prompt == ben.profile_prompt
        ]
        assert not ben_calls

    def test_wait_deadline_respects_time_scale(self):
        session = fresh_session(time_scale=1000.0)
        session.step()  # everyone plans; pure evaluators wait with huge deadlines
        ben = session.agents["ben"]
        assert ben.phase is AgentPhase.WAIT
        deadline = ben.wait_deadline
        assert deadline >= 30.0 * 1000.0
        session.step()
        assert ben.phase is AgentPhase.WAIT  # still asleep

    def test_time_scale_zero_replans_immediately(self):
        session = fresh_session(time_scale=0.0)
        session.step()
        ben = session.agents["ben"]
        assert ben.phase is AgentPhase.WAIT
        session.step()
        assert ben.phase is not AgentPhase.WAIT or ben.wait_deadline <= session.clock.now()

    def test_reflect_follows_evaluation_of_own_idea(self):
        session = fresh_session(time_scale=0.0)
        open_gate(session)
        # ada creates an idea; find it and have the human evaluate it
        for _ in range(6):
            session.step()
            ada_ideas = [i for i in session.board.ideas if i.author == "ada"]
            if ada_ideas:
                break
        assert ada_ideas
        from ideateam.engine import HumanEvaluateIdea

        session.submit_human_action(
            HumanEvaluateIdea(idea_id=ada_ideas[0].idea_id, novelty=4, completeness=4, quality=4)
        )
        assert session.agents["ada"].reflect_triggers
        for _ in range(10):
            session.step()
            if any(
                isinstance(e, PhaseChanged) and e.member == "ada" and e.phase is AgentPhase.REFLECT
                for e in session.log
            ):
                break
        assert any(
            isinstance(e, PhaseChanged) and e.member == "ada" and e.phase is AgentPhase.REFLECT
            for e in session.log
        )


class TestReflectionApply:
    def test_relationship_keys_limited_to_adjacent_involved(self):
        session = fresh_session()
        ada = session.agents["ada"]
        trigger = FeedbackClosedTrigger(session_ref="fb-1", peer="cyd", turns=(("ada", "hi"), ("cyd", "yo")))
        delta = ReflectionDelta(
            new_knowledge=["anchor in scenarios"],
            strategy_revisions={"feedback": "lead with specifics"},
            relationship_updates={"cyd": "responsive", "ghost": "should be ignored"},
        )
        apply_reflection(ada, session, trigger, delta)
        assert "ghost" not in ada.ltm.relationships
        assert ada.ltm.relationships["cyd"].responsiveness_note == "responsive"
        assert "anchor in scenarios" in ada.ltm.design_knowledge
        assert ada.ltm.action_strategies["feedback"] == "lead with specifics"

    def test_closed_transcript_bumps_interaction_counter(self):
        session = fresh_session()
        ada = session.agents["ada"]
        before = ada.ltm.relationships["cyd"].interactions
        trigger = FeedbackClosedTrigger(session_ref="fb-9", peer="cyd", turns=(("ada", "a"), ("cyd", "b")))
        delta = ReflectionDelta(relationship_updates={"cyd": "engaged"})
        apply_reflection(ada, session, trigger, delta)
        assert ada.ltm.relationships["cyd"].interactions == before + 1

    def test_empty_delta_is_noop(self):
        session = fresh_session()
        ada = session.agents["ada"]
        knowledge_before = list(ada.ltm.design_knowledge)
        relationships_before = {m: r.interactions for m, r in ada.ltm.relationships.items()}
        trigger = EvaluationTrigger(
            Evaluation(idea_id="idea-1", evaluator="user", novelty=4, completeness=4, quality=4, created_at=0.0)
        )
        apply_reflection(ada, session, trigger, ReflectionDelta())
        assert ada.ltm.design_knowledge == knowledge_before
        assert {m: r.interactions for m, r in ada.ltm.relationships.items()} == relationships_before

    def test_non_adjacent_evaluator_never_enters_relationships(self):
        session = fresh_session()
        cyd = session.agents["cyd"]  # cyd is not adjacent to user
        assert "user" not in session.config.neighbors("cyd")
        trigger = EvaluationTrigger(
            Evaluation(idea_id="idea-1", evaluator="user", novelty=4, completeness=4, quality=4, created_at=0.0)
        )
        delta = ReflectionDelta(relationship_updates={"user": "sharp critic"})
        apply_reflection(cyd, session, trigger, delta)
        assert "user" not in cyd.ltm.relationships


class TestStmBoundDuringRuns:
    def test_recent_actions_never_exceed_five(self):
        session = fresh_session(time_scale=0.0)
        open_gate(session)
        for _ in range(40):
            session.step()
            for agent in session.agents.values():
                assert len(agent.stm.recent_actions) <= 5
