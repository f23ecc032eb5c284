"""Per-agent behavioral loop: Plan -> Act -> Reflect -> Wait.

Each tick advances an agent exactly one phase step. Acting performs exactly one
action (or records a skip); reflection digests exactly one queued trigger.
Waits are sampled in virtual seconds and interrupted by incoming requests or
feedback turns.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Optional

from . import pipelines
from .events import AgentPhase, SessionEvent
from .ideas import Evaluation
from .memory import ActionRecord, LongTermMemory, RequestItem, ShortTermMemory, record_action
from .pipelines import FeedbackDeferred, PipelineFailure, ReflectionDelta
from .team import RoleKind, TeamConfig, REQUESTABLE_ROLES, ROLE_ORDER

WAIT_SECONDS_MIN = 30
WAIT_SECONDS_MAX = 60

LEGAL_TRANSITIONS = {
    (AgentPhase.PLAN, AgentPhase.ACT),
    (AgentPhase.PLAN, AgentPhase.WAIT),
    (AgentPhase.ACT, AgentPhase.REFLECT),
    (AgentPhase.ACT, AgentPhase.WAIT),
    (AgentPhase.REFLECT, AgentPhase.WAIT),
    (AgentPhase.WAIT, AgentPhase.PLAN),
    (AgentPhase.WAIT, AgentPhase.ACT),
}


class AdjacencyViolationError(ValueError):
    """Requester and recipient are not directly connected."""


@dataclass
class EvaluationTrigger:
    evaluation: Evaluation
    kind: str = "evaluation"

    def involved(self) -> list[str]:
        return [self.evaluation.evaluator]

    def describe(self) -> str:
        e = self.evaluation
        comment = f' Comment: "{e.comment}"' if e.comment else ""
        return (
            f"Your idea {e.idea_id} was evaluated by {e.evaluator}: novelty {e.novelty}, "
            f"completeness {e.completeness}, quality {e.quality}.{comment}"
        )


@dataclass
class FeedbackClosedTrigger:
    session_ref: str
    peer: str
    turns: tuple[tuple[str, str], ...]
    kind: str = "feedback"

    def involved(self) -> list[str]:
        return [self.peer]

    def describe(self) -> str:
        transcript = "\n".join(f"[{author}] {text}" for author, text in self.turns)
        return f"A feedback conversation with {self.peer} just concluded:\n{transcript}"


@dataclass
class PlannedTask:
    role: Optional[RoleKind] = None
    request: Optional[RequestItem] = None


@dataclass
class AgentState:
    member_id: str
    roles: tuple[RoleKind, ...]
    profile_prompt: str
    rng: random.Random
    phase: AgentPhase = AgentPhase.PLAN
    wait_deadline: float = 0.0
    stm: ShortTermMemory = field(default_factory=ShortTermMemory)
    ltm: LongTermMemory = field(default_factory=LongTermMemory)
    reflect_triggers: Deque = field(default_factory=deque)
    planned: Optional[PlannedTask] = None

    def has_role(self, role: RoleKind) -> bool:
        return role in self.roles


def enqueue_request(agent: AgentState, item: RequestItem, config: TeamConfig) -> None:
    """FIFO append; the wait-state interrupt picks it up on the agent's next tick."""
    if item.from_member not in config.neighbors(agent.member_id):
        raise AdjacencyViolationError(f"{item.from_member} is not adjacent to {agent.member_id}")
    agent.stm.pending_requests.append(item)


def tick(agent: AgentState, session) -> list[SessionEvent]:
    """Advance the agent exactly one phase step; events go through the session's
    single commit point."""
    if agent.phase is AgentPhase.WAIT:
        return _tick_wait(agent, session)
    if agent.phase is AgentPhase.PLAN:
        return _tick_plan(agent, session)
    if agent.phase is AgentPhase.ACT:
        return _tick_act(agent, session)
    return _tick_reflect(agent, session)


# --- wait ----------------------------------------------------------------------

def _awaiting_turn(agent: AgentState, session):
    """The open feedback thread whose next turn is this agent's, if any."""
    ref = agent.stm.active_feedback
    if ref is None:
        return None
    thread = session.feedback_sessions.get(ref)
    if thread is not None and thread.open and thread.next_author() == agent.member_id:
        return thread
    return None


def _request_feasible(item: RequestItem, agent: AgentState, session) -> bool:
    if item.action is RoleKind.IDEA_EVALUATION:
        return len(session.board) > 0
    if item.action is RoleKind.FEEDBACK:
        if session.busy_in_feedback(agent.member_id):
            return False
        return any(
            not session.busy_in_feedback(m) for m in session.config.neighbors(agent.member_id)
        )
    return True


def _interrupt_ready(agent: AgentState, session) -> bool:
    if _awaiting_turn(agent, session) is not None:
        return True
    queue = agent.stm.pending_requests
    return bool(queue) and _request_feasible(queue[0], agent, session)


def _tick_wait(agent: AgentState, session) -> list[SessionEvent]:
    if _interrupt_ready(agent, session):
        return [session.emit_phase(agent.member_id, AgentPhase.ACT)]
    if session.clock.now() >= agent.wait_deadline:
        return [session.emit_phase(agent.member_id, AgentPhase.PLAN)]
    return []


def _rest(agent: AgentState, session) -> list[SessionEvent]:
    """Move on after acting/reflecting: reflect if triggered, else wait."""
    if agent.reflect_triggers:
        return [session.emit_phase(agent.member_id, AgentPhase.REFLECT)]
    return _wait(agent, session)


def _wait(agent: AgentState, session) -> list[SessionEvent]:
    duration = agent.rng.randint(WAIT_SECONDS_MIN, WAIT_SECONDS_MAX) * session.time_scale
    agent.wait_deadline = session.clock.now() + duration
    return [session.emit_phase(agent.member_id, AgentPhase.WAIT)]


# --- plan ----------------------------------------------------------------------

def plan_options(agent: AgentState, session) -> list[RoleKind]:
    """Assigned roles filtered down to what is legal and feasible right now."""
    options: list[RoleKind] = []
    for role in ROLE_ORDER:
        if not agent.has_role(role):
            continue
        if not session.gate_open and role is not RoleKind.IDEA_GENERATION:
            continue
        if role is RoleKind.IDEA_EVALUATION and not len(session.board):
            continue
        if role is RoleKind.FEEDBACK and not _feedback_plannable(agent, session):
            continue
        if role is RoleKind.REQUEST:
            neighbors = session.config.neighbors(agent.member_id)
            if not any(
                session.config.member(m).has_role(r)
                for m in neighbors
                for r in REQUESTABLE_ROLES
            ):
                continue
        options.append(role)
    return options


def _feedback_plannable(agent: AgentState, session) -> bool:
    """Feedback is worth planning if a counterpart is free, or a busy agent host
    could still take the initiation as an implicit request (once, not repeatedly)."""
    if session.busy_in_feedback(agent.member_id):
        return False
    neighbors = session.config.neighbors(agent.member_id)
    if any(not session.busy_in_feedback(m) for m in neighbors):
        return True
    for member_id in neighbors:
        host = session.agents.get(member_id)
        if host is None or not session.config.member(member_id).has_role(RoleKind.FEEDBACK):
            continue
        already_asked = any(
            item.implicit and item.from_member == agent.member_id
            for item in host.stm.pending_requests
        )
        if not already_asked:
            return True
    return False


def _tick_plan(agent: AgentState, session) -> list[SessionEvent]:
    queue = agent.stm.pending_requests
    if queue and _request_feasible(queue[0], agent, session):
        agent.planned = PlannedTask(request=queue[0])
        return [session.emit_phase(agent.member_id, AgentPhase.ACT)]

    options = plan_options(agent, session)
    if not options:
        return _wait(agent, session)
    try:
        decision = pipelines.run_plan(agent, session, options)
    except PipelineFailure:
        return _wait(agent, session)
    if decision.chosen == "wait":
        return _wait(agent, session)
    agent.planned = PlannedTask(role=RoleKind(decision.chosen))
    return [session.emit_phase(agent.member_id, AgentPhase.ACT)]


# --- act -------------------------------------------------------------------------

def _tick_act(agent: AgentState, session) -> list[SessionEvent]:
    events: list[SessionEvent] = []
    me = agent.member_id
    planned = agent.planned
    agent.planned = None

    thread = _awaiting_turn(agent, session)
    if thread is not None:
        events += _act_feedback_response(agent, session, thread)
        return events + _rest(agent, session)

    request: Optional[RequestItem] = None
    role: Optional[RoleKind] = None
    if planned is not None and planned.request is not None:
        request = planned.request
    elif planned is not None and planned.role is not None:
        role = planned.role
    elif agent.stm.pending_requests:
        request = agent.stm.pending_requests[0]
    else:
        events.append(session.emit_action_skipped(me, "stale_wake"))
        return events + _rest(agent, session)

    if request is not None:
        role = request.action

    try:
        if role is RoleKind.IDEA_GENERATION:
            decision, content = pipelines.run_generation(agent, session, request)
            if decision.mode == "update":
                events.append(session.emit_idea_updated(me, decision.target, content))
                record_action(agent.stm, _record(session, "idea_generation", f"updated {decision.target}"))
            else:
                event = session.emit_idea_generated(me, content)
                events.append(event)
                record_action(agent.stm, _record(session, "idea_generation", f"created {event.idea.idea_id}"))
        elif role is RoleKind.IDEA_EVALUATION:
            idea_id, result = pipelines.run_evaluation(agent, session, request)
            events.append(session.emit_evaluation(me, idea_id, result))
            record_action(agent.stm, _record(session, "idea_evaluation", f"evaluated {idea_id}"))
        elif role is RoleKind.FEEDBACK:
            try:
                recipient, opening = pipelines.run_feedback_initiation(agent, session, request)
            except FeedbackDeferred as deferred:
                # Hand an autonomous initiation to a busy host's queue as an
                # implicit feedback request; explicit requests stay queued here.
                if request is None and deferred.defer_to is not None:
                    session.defer_feedback_to(deferred.defer_to, me)
                events.append(session.emit_action_skipped(me, "feedback_deferred"))
                return events + _rest(agent, session)
            ref, opened = session.open_feedback(me, recipient, opening.message)
            events += opened
            record_action(agent.stm, _record(session, "feedback", f"opened {ref} with {recipient}"))
        elif role is RoleKind.REQUEST:
            decision = pipelines.run_request(agent, session)
            events.append(
                session.emit_request(me, decision.recipient, decision.action, decision.message)
            )
            record_action(
                agent.stm, _record(session, "request", f"asked {decision.recipient} for {decision.action.value}")
            )
        else:  # pragma: no cover - role is always set on this path
            raise PipelineFailure("no_action", "nothing to act on")
    except PipelineFailure as exc:
        events.append(session.emit_action_skipped(me, exc.reason))
        return events + _rest(agent, session)

    if request is not None:
        if not request.implicit:
            events.append(session.emit_request_fulfilled(request.ref))
        agent.stm.pending_requests.pop(0)

    return events + _rest(agent, session)


def _act_feedback_response(agent: AgentState, session, thread) -> list[SessionEvent]:
    events: list[SessionEvent] = []
    me = agent.member_id
    try:
        turn = pipelines.run_feedback_response(agent, session, thread)
    except PipelineFailure as exc:
        # Never stall the partner: a broken response force-closes the thread.
        events.append(session.emit_action_skipped(me, exc.reason))
        if thread.open:
            events += session.close_feedback(thread.ref, forced=True)
        return events
    events += session.emit_feedback_message(thread.ref, me, turn.message)
    if turn.conclude and thread.open:
        events += session.close_feedback(thread.ref)
    record_action(agent.stm, _record(session, "feedback_response", f"replied in {thread.ref}"))
    return events


def _record(session, kind: str, detail: str) -> ActionRecord:
    return ActionRecord(at=session.clock.now(), kind=kind, detail=detail)


# --- reflect ---------------------------------------------------------------------

def _tick_reflect(agent: AgentState, session) -> list[SessionEvent]:
    trigger = agent.reflect_triggers.popleft()
    try:
        delta = pipelines.run_reflection(agent, session, trigger)
    except PipelineFailure:
        delta = None  # failed reflection is a no-op
    if delta is not None:
        apply_reflection(agent, session, trigger, delta)
    return _wait(agent, session)


def apply_reflection(agent: AgentState, session, trigger, delta: ReflectionDelta) -> None:
    """Apply one delta atomically: knowledge appends, strategies overwrite,
    relationship entries upsert for involved adjacent members only."""
    from .memory import Relationship, STRATEGY_KEYS

    agent.ltm.design_knowledge.extend(delta.new_knowledge)
    for key, text in delta.strategy_revisions.items():
        if key in STRATEGY_KEYS:
            agent.ltm.action_strategies[key] = text
    adjacent = set(session.config.neighbors(agent.member_id))
    involved = set(trigger.involved())
    for member_id, note in delta.relationship_updates.items():
        if member_id not in adjacent or member_id not in involved:
            continue
        rel = agent.ltm.relationships.get(member_id)
        if rel is None:
            rel = Relationship(belief=member_id)
            agent.ltm.relationships[member_id] = rel
        rel.interactions += 1
        rel.responsiveness_note = note
