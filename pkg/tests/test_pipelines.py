"""Pipeline behavior: legality of outputs, prompt ingredients, temperatures."""

import json

import pytest

from ideateam.engine import FeedbackThread, start_session
from ideateam.ideas import IdeaContent
from ideateam.memory import RequestItem
from ideateam.pipelines import (
    CREATIVE_SCHEMAS,
    FeedbackDeferred,
    PipelineFailure,
    run_evaluation,
    run_feedback_initiation,
    run_feedback_response,
    run_generation,
    run_plan,
    run_request,
)
from ideateam.providers import MockProvider, record_traffic
from ideateam.team import RoleKind

from conftest import StubProvider, rich_config


def fresh_session(seed: int = 5, provider=None):
    provider = provider or MockProvider(seed=seed)
    return start_session(rich_config(), provider, seed=seed, time_scale=0.0)


def seeded_board(session, n: int = 2):
    for index in range(n):
        session.emit_idea_generated(
            "ada",
            IdeaContent(
                title=f"Seed {index}", object=f"O{index}", function=f"F{index}",
                behavior=f"B{index}", structure=f"S{index}",
            ),
        )


class TestPlan:
    def test_choice_is_always_an_offered_option_or_wait(self):
        session = fresh_session()
        ada = session.agents["ada"]
        options = [RoleKind.IDEA_GENERATION]
        for _ in range(5):
            decision = run_plan(ada, session, options)
            assert decision.chosen in {"idea_generation", "wait"}

    def test_round_robin_alternates_over_roles(self):
        session = fresh_session()
        ada = session.agents["ada"]
        options = [RoleKind.IDEA_GENERATION, RoleKind.FEEDBACK]
        chosen = [run_plan(ada, session, options).chosen for _ in range(4)]
        assert chosen[0] != chosen[1]
        assert chosen[:2] == chosen[2:]

    def test_provider_failure_becomes_pipeline_failure(self):
        stub = StubProvider(["junk", "junk", "junk"])
        session = fresh_session(provider=stub)
        with pytest.raises(PipelineFailure) as excinfo:
            run_plan(session.agents["ada"], session, [RoleKind.IDEA_GENERATION])
        assert excinfo.value.reason == "malformed_output"


class TestGeneration:
    def test_empty_board_forces_new(self):
        session = fresh_session()
        for _ in range(3):
            decision, content = run_generation(session.agents["ada"], session)
            assert decision.mode == "new"
            assert content.object and content.behavior

    def test_update_uses_template_and_existing_target(self):
        session = fresh_session()
        seeded_board(session)
        saw_update = False
        for _ in range(4):
            decision, content = run_generation(session.agents["ada"], session)
            if decision.mode == "update":
                saw_update = True
                assert decision.target in {i.idea_id for i in session.board.ideas}
                prompt = record_traffic(session.provider)[-1].user_prompt
                template = session.board.get(decision.target)
                assert template.object in prompt  # template fields travel into the prompt
        assert saw_update

    def test_request_details_appear_verbatim_in_prompt(self):
        session = fresh_session()
        request = RequestItem("req-1", "user", RoleKind.IDEA_GENERATION, "generate an IoT idea")
        run_generation(session.agents["ada"], session, request)
        prompts = [r.user_prompt for r in record_traffic(session.provider)]
        assert all("generate an IoT idea" in p for p in prompts[-2:])

    def test_generation_calls_run_hot(self):
        session = fresh_session()
        run_generation(session.agents["ada"], session)
        last_two = record_traffic(session.provider)[-2:]
        assert [r.temperature for r in last_two] == [0.8, 0.8]
        assert all(r.schema_id in CREATIVE_SCHEMAS for r in last_two)


class TestEvaluation:
    def test_target_is_on_the_board(self):
        session = fresh_session()
        seeded_board(session, 3)
        for _ in range(5):
            idea_id, result = run_evaluation(session.agents["ben"], session)
            assert idea_id in {i.idea_id for i in session.board.ideas}
            assert 1 <= result.novelty <= 7
            assert result.comment

    def test_empty_board_fails_fast(self):
        session = fresh_session()
        with pytest.raises(PipelineFailure) as excinfo:
            run_evaluation(session.agents["ben"], session)
        assert excinfo.value.reason == "nothing_to_evaluate"

    def test_out_of_range_model_scores_become_failure(self):
        bad = json.dumps({"novelty": 9, "completeness": 5, "quality": 5, "comment": "x"})
        target = json.dumps({"idea_id": "idea-1"})
        stub = StubProvider([target, bad, bad, bad])
        session = fresh_session(provider=stub)
        seeded_board(session, 1)
        with pytest.raises(PipelineFailure) as excinfo:
            run_evaluation(session.agents["ben"], session)
        assert excinfo.value.reason == "malformed_output"

    def test_evaluation_runs_at_base_temperature(self):
        session = fresh_session()
        seeded_board(session)
        run_evaluation(session.agents["ben"], session)
        assert all(r.temperature == 0.5 for r in record_traffic(session.provider)[-2:])


class TestFeedbackInitiation:
    def test_single_free_neighbor_is_selected(self):
        session = fresh_session()
        seeded_board(session)
        # make everyone but cyd busy from ada's perspective
        session.feedback_sessions["fb-x"] = FeedbackThread(ref="fb-x", initiator="user", recipient="ben")
        recipient, opening = run_feedback_initiation(session.agents["ada"], session)
        assert recipient == "cyd"
        assert opening.conclude is False
        assert opening.message

    def test_recipient_always_adjacent(self):
        session = fresh_session()
        seeded_board(session)
        for _ in range(6):
            recipient, _ = run_feedback_initiation(session.agents["ada"], session)
            assert recipient in session.config.neighbors("ada")

    def test_all_neighbors_busy_defers_without_events(self):
        session = fresh_session()
        for ref, (a, b) in {"fb-1": ("user", "ben"), "fb-2": ("cyd", "ada")}.items():
            session.feedback_sessions[ref] = FeedbackThread(ref=ref, initiator=a, recipient=b)
        events_before = len(session.log)
        with pytest.raises(FeedbackDeferred):
            run_feedback_initiation(session.agents["ben"], session)
        assert len(session.log) == events_before

    def test_busy_self_defers(self):
        session = fresh_session()
        session.feedback_sessions["fb-1"] = FeedbackThread(ref="fb-1", initiator="ada", recipient="cyd")
        with pytest.raises(FeedbackDeferred):
            run_feedback_initiation(session.agents["ada"], session)


class TestFeedbackResponse:
    def test_mock_concludes_by_sixth_turn(self):
        session = fresh_session()
        thread = FeedbackThread(ref="fb-1", initiator="ada", recipient="cyd")
        concluded_at = None
        for turn_number in range(1, 13):
            author = "ada" if len(thread.turns) % 2 == 0 else "cyd"
            agent = session.agents[author]
            turn = run_feedback_response(agent, session, thread)
            thread.turns.append((author, turn.message))
            if turn.conclude:
                concluded_at = turn_number
                break
        assert concluded_at is not None and concluded_at <= 6

    def test_cap_is_configurable(self):
        session = fresh_session(provider=MockProvider(seed=5, feedback_turn_cap=3))
        thread = FeedbackThread(ref="fb-1", initiator="ada", recipient="cyd")
        thread.turns.append(("ada", "opening"))
        thread.turns.append(("cyd", "reply"))
        turn = run_feedback_response(session.agents["ada"], session, thread)
        assert turn.conclude is True


class TestRequest:
    def test_recipient_adjacent_and_action_held(self):
        session = fresh_session()
        for _ in range(6):
            decision = run_request(session.agents["ben"], session)
            assert decision.recipient in session.config.neighbors("ben")
            recipient = session.config.member(decision.recipient)
            assert recipient.has_role(decision.action)
            assert decision.action is not RoleKind.REQUEST
            assert decision.message

    def test_illegal_pairing_from_model_fails_after_retries(self):
        illegal = json.dumps({"recipient": "cyd", "action": "feedback"})  # cyd lacks feedback
        stub = StubProvider([illegal, illegal, illegal])
        session = fresh_session(provider=stub)
        with pytest.raises(PipelineFailure) as excinfo:
            run_request(session.agents["ben"], session)
        assert excinfo.value.reason == "malformed_output"
        assert len(stub.recorded) == 3


class TestTemperatureDiscipline:
    def test_only_generation_schemas_run_hot(self):
        session = fresh_session()
        seeded_board(session)
        run_plan(session.agents["ada"], session, [RoleKind.IDEA_GENERATION, RoleKind.FEEDBACK])
        run_generation(session.agents["ada"], session)
        run_evaluation(session.agents["ben"], session)
        run_request(session.agents["ben"], session)
        run_feedback_initiation(session.agents["ada"], session)
        for request in record_traffic(session.provider):
            expected = 0.8 if request.schema_id in CREATIVE_SCHEMAS else 0.5
            assert request.temperature == expected
