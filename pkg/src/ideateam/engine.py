"""Live ideation sessions: the authoritative event log, permission enforcement,
the first-idea gate, human action ingestion, and the agent scheduling loop.

All state changes funnel through one serialized commit point; the event log is
the single source of truth, and :func:`fold_events` rebuilds the observable
session state from it (the replay contract).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Annotated, Callable, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from . import events as ev
from ._canon import canonical_dumps
from .agents import (
    AgentState,
    EvaluationTrigger,
    FeedbackClosedTrigger,
    enqueue_request,
    tick,
)
from .events import AgentPhase, SessionEvent
from .ideas import Evaluation, IdeaBoard, IdeaContent
from .memory import RequestItem
from .pipelines import EvaluationResult
from .profiles import build_profile_prompt, team_context_for
from .providers import Provider
from .team import (
    REQUESTABLE_ROLES,
    RoleKind,
    TeamConfig,
    UnknownMemberError,
    ValidationReport,
    validate_team,
)

logger = logging.getLogger(__name__)

QUANTUM_SECONDS = 1.0
FEEDBACK_TURN_HARD_CAP = 12

# Rejection rules form a closed, published set mirrored by the API.
RULE_ROLE_VIOLATION = "RoleViolation"
RULE_GATE_CLOSED = "GateClosed"
RULE_ADJACENCY_VIOLATION = "AdjacencyViolation"
RULE_FEEDBACK_BUSY = "FeedbackBusy"
RULE_RECIPIENT_ROLE = "RecipientRoleViolation"
RULE_NOT_YOUR_TURN = "NotYourTurn"
RULE_NOT_A_PARTICIPANT = "NotAParticipant"
RULE_UNKNOWN_IDEA = "UnknownIdea"
RULE_UNKNOWN_FEEDBACK_SESSION = "UnknownFeedbackSession"

REJECTION_RULES = (
    RULE_ROLE_VIOLATION,
    RULE_GATE_CLOSED,
    RULE_ADJACENCY_VIOLATION,
    RULE_FEEDBACK_BUSY,
    RULE_RECIPIENT_ROLE,
    RULE_NOT_YOUR_TURN,
    RULE_NOT_A_PARTICIPANT,
    RULE_UNKNOWN_IDEA,
    RULE_UNKNOWN_FEEDBACK_SESSION,
)


class InvalidTeamError(ValueError):
    def __init__(self, report: ValidationReport) -> None:
        super().__init__("team config failed validation")
        self.report = report


class SessionEndedError(RuntimeError):
    """The log is sealed; no further appends or actions."""


class BadActionError(ValueError):
    """Structurally malformed human action payload."""


class Rejection(BaseModel):
    rule: str
    detail: str = ""


class VirtualClock:
    """Virtual seconds; advances only when stepped, so tests run instantly."""

    def __init__(self) -> None:
        self._now = 0.0

    def now(self) -> float:
        return self._now

    def advance(self, seconds: float = QUANTUM_SECONDS) -> float:
        self._now += seconds
        return self._now


@dataclass
class FeedbackThread:
    ref: str
    initiator: str
    recipient: str
    turns: list[tuple[str, str]] = field(default_factory=list)
    open: bool = True

    def parties(self) -> tuple[str, str]:
        return (self.initiator, self.recipient)

    def peer_of(self, member_id: str) -> str:
        return self.recipient if member_id == self.initiator else self.initiator

    def next_author(self) -> str:
        # Turns strictly alternate, starting with the initiator's opening.
        return self.initiator if len(self.turns) % 2 == 0 else self.recipient


@dataclass
class RequestRecord:
    ref: str
    from_member: str
    to_member: str
    action: RoleKind
    text: str
    fulfilled: bool = False


# --- human actions ----------------------------------------------------------------

class HumanGenerateIdea(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["generate_idea"] = "generate_idea"
    title: str = ""
    object: str = Field(min_length=1)
    function: str = Field(min_length=1)
    behavior: str = Field(min_length=1)
    structure: str = Field(min_length=1)


class HumanUpdateIdea(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["update_idea"] = "update_idea"
    parent_id: str
    title: str = ""
    object: str = Field(min_length=1)
    function: str = Field(min_length=1)
    behavior: str = Field(min_length=1)
    structure: str = Field(min_length=1)


class HumanEvaluateIdea(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["evaluate_idea"] = "evaluate_idea"
    idea_id: str
    novelty: int = Field(ge=1, le=7)
    completeness: int = Field(ge=1, le=7)
    quality: int = Field(ge=1, le=7)
    comment: Optional[str] = None


class HumanOpenFeedback(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["open_feedback"] = "open_feedback"
    recipient: str
    message: str = Field(min_length=1)


class HumanFeedbackReply(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["feedback_reply"] = "feedback_reply"
    session_ref: str
    message: str = Field(min_length=1)
    conclude: bool = False


class HumanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["request"] = "request"
    recipient: str
    action: Literal["idea_generation", "idea_evaluation", "feedback"]
    text: str = Field(min_length=1)


HumanAction = Annotated[
    Union[
        HumanGenerateIdea,
        HumanUpdateIdea,
        HumanEvaluateIdea,
        HumanOpenFeedback,
        HumanFeedbackReply,
        HumanRequest,
    ],
    Field(discriminator="kind"),
]


class ActionOutcome(BaseModel):
    ok: bool
    rejection: Optional[Rejection] = None
    events: list = Field(default_factory=list)


# --- the session --------------------------------------------------------------------

class Session:
    """One live ideation run. Single-writer: every event passes through ``commit``."""

    def __init__(
        self,
        session_id: str,
        config: TeamConfig,
        provider: Provider,
        seed: int,
        time_scale: float,
    ) -> None:
        self.session_id = session_id
        self.config = config
        self.provider = provider
        self.seed = seed
        self.time_scale = time_scale
        self.clock = VirtualClock()
        self.log: list[SessionEvent] = []
        self.board = IdeaBoard()
        self.human_id = config.human_id()
        self.human_inbox: list[dict] = []
        self.feedback_sessions: dict[str, FeedbackThread] = {}
        self.requests: dict[str, RequestRecord] = {}
        self.gate_open = False
        self.ended = False
        self.sinks: list[Callable[[SessionEvent], None]] = []
        self._seq = 0
        self._fb_counter = 1
        self._req_counter = 1
        self._implicit_counter = 0

        self.agents: dict[str, AgentState] = {}
        for member in config.agents():
            context = team_context_for(config, member.member_id)
            prompt = build_profile_prompt(member.persona, config.smm, context)
            state = AgentState(
                member_id=member.member_id,
                roles=tuple(member.roles),
                profile_prompt=prompt,
                rng=random.Random(f"{seed}:{member.member_id}"),
            )
            # Seed working beliefs about every directly connected teammate.
            from .memory import Relationship

            for neighbor in context.neighbors:
                state.ltm.relationships[neighbor.member_id] = Relationship(
                    belief=f"{neighbor.name}, {neighbor.relation}; roles: "
                    + ", ".join(r.value for r in neighbor.roles)
                )
            self.agents[member.member_id] = state
        self._agent_order = sorted(self.agents)

    # --- commit point ---------------------------------------------------------

    def commit(self, event_cls, **fields) -> SessionEvent:
        """The single serialized append point; assigns seq and virtual time."""
        if self.ended:
            raise SessionEndedError(self.session_id)
        event = event_cls(seq=self._seq, at=self.clock.now(), **fields)
        self._seq += 1
        self.log.append(event)
        for sink in self.sinks:
            sink(event)
        return event

    # --- emit helpers (state change + event, always together) ------------------

    def emit_phase(self, member_id: str, phase: AgentPhase) -> SessionEvent:
        self.agents[member_id].phase = phase
        return self.commit(ev.PhaseChanged, member=member_id, phase=phase)

    def emit_idea_generated(self, author: str, content: IdeaContent) -> SessionEvent:
        idea_id = self.board.create_idea(author, content, at=self.clock.now())
        event = self.commit(ev.IdeaGenerated, idea=self.board.get(idea_id))
        self.gate_open = True
        return event

    def emit_idea_updated(self, author: str, parent_id: str, content: IdeaContent) -> SessionEvent:
        idea_id = self.board.update_idea(author, parent_id, content, at=self.clock.now())
        return self.commit(ev.IdeaUpdated, idea=self.board.get(idea_id))

    def emit_evaluation(self, evaluator: str, idea_id: str, result: EvaluationResult) -> SessionEvent:
        evaluation = Evaluation(
            idea_id=idea_id,
            evaluator=evaluator,
            novelty=result.novelty,
            completeness=result.completeness,
            quality=result.quality,
            comment=result.comment,
            created_at=self.clock.now(),
        )
        self.board.add_evaluation(evaluation)
        event = self.commit(ev.IdeaEvaluated, evaluation=evaluation)
        author = self.board.get(idea_id).author
        agent = self.agents.get(author)
        if agent is not None:
            agent.reflect_triggers.append(EvaluationTrigger(evaluation))
        return event

    def open_feedback(self, initiator: str, recipient: str, message: str) -> tuple[str, list[SessionEvent]]:
        ref = f"fb-{self._fb_counter}"
        self._fb_counter += 1
        thread = FeedbackThread(ref=ref, initiator=initiator, recipient=recipient)
        self.feedback_sessions[ref] = thread
        opened = self.commit(ev.FeedbackOpened, session_ref=ref, initiator=initiator, recipient=recipient)
        for party in thread.parties():
            agent = self.agents.get(party)
            if agent is not None:
                agent.stm.active_feedback = ref
        if recipient == self.human_id:
            self.human_inbox.append(
                {"kind": "feedback_opened", "ref": ref, "from": initiator, "at": self.clock.now()}
            )
        events = [opened] + self.emit_feedback_message(ref, initiator, message)
        return ref, events

    def emit_feedback_message(self, ref: str, author: str, text: str) -> list[SessionEvent]:
        thread = self.feedback_sessions[ref]
        if not thread.open:
            raise BadActionError(f"feedback thread {ref} is closed")
        if thread.next_author() != author:
            raise BadActionError(f"not {author}'s turn in {ref}")
        thread.turns.append((author, text))
        events = [self.commit(ev.FeedbackMessage, session_ref=ref, author=author, text=text)]
        peer = thread.peer_of(author)
        if peer == self.human_id:
            self.human_inbox.append(
                {"kind": "feedback_message", "ref": ref, "from": author, "text": text, "at": self.clock.now()}
            )
        # Hard cap: bounded conversations even if nobody concludes.
        if thread.open and len(thread.turns) >= FEEDBACK_TURN_HARD_CAP:
            events += self.close_feedback(ref, forced=True)
        return events

    def close_feedback(self, ref: str, forced: bool = False) -> list[SessionEvent]:
        thread = self.feedback_sessions[ref]
        if not thread.open:
            return []
        thread.open = False
        event = self.commit(ev.FeedbackClosed, session_ref=ref, forced=forced)
        for party in thread.parties():
            agent = self.agents.get(party)
            if agent is not None:
                agent.stm.active_feedback = None
                agent.reflect_triggers.append(
                    FeedbackClosedTrigger(
                        session_ref=ref,
                        peer=thread.peer_of(party),
                        turns=tuple(thread.turns),
                    )
                )
        return [event]

    def emit_request(self, from_member: str, to_member: str, action: RoleKind, text: str) -> SessionEvent:
        ref = f"req-{self._req_counter}"
        self._req_counter += 1
        self.requests[ref] = RequestRecord(
            ref=ref, from_member=from_member, to_member=to_member, action=action, text=text
        )
        event = self.commit(
            ev.RequestIssued, request_ref=ref, from_member=from_member,
            to_member=to_member, action=action, text=text,
        )
        agent = self.agents.get(to_member)
        if agent is not None:
            enqueue_request(agent, RequestItem(ref=ref, from_member=from_member, action=action, text=text), self.config)
        else:
            self.human_inbox.append(
                {"kind": "request", "ref": ref, "from": from_member, "action": action.value,
                 "text": text, "at": self.clock.now()}
            )
        return event

    def emit_request_fulfilled(self, ref: str) -> SessionEvent:
        self.requests[ref].fulfilled = True
        return self.commit(ev.RequestFulfilled, request_ref=ref)

    def defer_feedback_to(self, busy_member: str, from_member: str) -> None:
        """Queue an implicit feedback request on a busy agent (no event; at most
        one pending per asking member)."""
        agent = self.agents.get(busy_member)
        if agent is None:
            return
        if any(
            item.implicit and item.from_member == from_member
            for item in agent.stm.pending_requests
        ):
            return
        self._implicit_counter += 1
        enqueue_request(
            agent,
            RequestItem(
                ref=f"ifb-{self._implicit_counter}",
                from_member=from_member,
                action=RoleKind.FEEDBACK,
                text=f"{from_member} wants to exchange feedback once you are free.",
                implicit=True,
            ),
            self.config,
        )

    def emit_action_skipped(self, member_id: str, reason: str) -> SessionEvent:
        return self.commit(ev.ActionSkipped, member=member_id, reason=reason)

    # --- queries ----------------------------------------------------------------

    def busy_in_feedback(self, member_id: str) -> bool:
        return any(
            t.open and member_id in t.parties() for t in self.feedback_sessions.values()
        )

    # --- permissions -------------------------------------------------------------

    def authorize(
        self,
        actor: str,
        action_kind: RoleKind,
        target: Optional[str] = None,
        requested_action: Optional[RoleKind] = None,
    ) -> Optional[Rejection]:
        """None when permitted; otherwise the violated rule. Pure policy check."""
        member = self.config.member(actor)  # raises UnknownMemberError
        if action_kind not in member.roles:
            return Rejection(rule=RULE_ROLE_VIOLATION, detail=f"{actor} does not hold {action_kind.value}")
        if not self.gate_open and action_kind is not RoleKind.IDEA_GENERATION:
            return Rejection(rule=RULE_GATE_CLOSED, detail="only idea generation is available before the first idea")
        if action_kind in (RoleKind.FEEDBACK, RoleKind.REQUEST):
            if target is None:
                return Rejection(rule=RULE_ADJACENCY_VIOLATION, detail="a target member is required")
            target_member = self.config.member(target)
            if target not in self.config.neighbors(actor):
                return Rejection(
                    rule=RULE_ADJACENCY_VIOLATION,
                    detail=f"{actor} and {target} are not directly connected",
                )
            if action_kind is RoleKind.FEEDBACK:
                for party in (actor, target):
                    if self.busy_in_feedback(party):
                        return Rejection(rule=RULE_FEEDBACK_BUSY, detail=f"{party} is already in a feedback session")
            if action_kind is RoleKind.REQUEST:
                if requested_action is None or requested_action not in REQUESTABLE_ROLES:
                    return Rejection(rule=RULE_RECIPIENT_ROLE, detail="requested action must be one of the three requestable kinds")
                if requested_action not in target_member.roles:
                    return Rejection(
                        rule=RULE_RECIPIENT_ROLE,
                        detail=f"{target} does not hold {requested_action.value}",
                    )
        return None

    # --- human surface --------------------------------------------------------------

    def submit_human_action(self, action: HumanAction) -> ActionOutcome:
        """Apply one human action exactly as an agent's would be; humans bypass Plan.
        Rejections are returned and logged as events (audit trail)."""
        if self.ended:
            raise SessionEndedError(self.session_id)
        actor = self.human_id

        def reject(rejection: Rejection) -> ActionOutcome:
            event = self.commit(ev.ActionRejected, actor=actor, rule=rejection.rule, detail=rejection.detail)
            return ActionOutcome(ok=False, rejection=rejection, events=[event])

        if isinstance(action, (HumanGenerateIdea, HumanUpdateIdea)):
            rejection = self.authorize(actor, RoleKind.IDEA_GENERATION)
            if rejection:
                return reject(rejection)
            content = IdeaContent(
                title=action.title, object=action.object, function=action.function,
                behavior=action.behavior, structure=action.structure,
            )
            if isinstance(action, HumanUpdateIdea):
                if action.parent_id not in self.board:
                    return reject(Rejection(rule=RULE_UNKNOWN_IDEA, detail=action.parent_id))
                return ActionOutcome(ok=True, events=[self.emit_idea_updated(actor, action.parent_id, content)])
            return ActionOutcome(ok=True, events=[self.emit_idea_generated(actor, content)])

        if isinstance(action, HumanEvaluateIdea):
            rejection = self.authorize(actor, RoleKind.IDEA_EVALUATION)
            if rejection:
                return reject(rejection)
            if action.idea_id not in self.board:
                return reject(Rejection(rule=RULE_UNKNOWN_IDEA, detail=action.idea_id))
            result = EvaluationResult(
                novelty=action.novelty, completeness=action.completeness,
                quality=action.quality, comment=action.comment,
            )
            return ActionOutcome(ok=True, events=[self.emit_evaluation(actor, action.idea_id, result)])

        if isinstance(action, HumanOpenFeedback):
            try:
                rejection = self.authorize(actor, RoleKind.FEEDBACK, target=action.recipient)
            except UnknownMemberError:
                return reject(Rejection(rule=RULE_ADJACENCY_VIOLATION, detail=f"unknown member {action.recipient}"))
            if rejection:
                return reject(rejection)
            _, opened = self.open_feedback(actor, action.recipient, action.message)
            return ActionOutcome(ok=True, events=opened)

        if isinstance(action, HumanFeedbackReply):
            thread = self.feedback_sessions.get(action.session_ref)
            if thread is None or not thread.open:
                return reject(Rejection(rule=RULE_UNKNOWN_FEEDBACK_SESSION, detail=action.session_ref))
            if actor not in thread.parties():
                return reject(Rejection(rule=RULE_NOT_A_PARTICIPANT, detail=action.session_ref))
            if thread.next_author() != actor:
                return reject(Rejection(rule=RULE_NOT_YOUR_TURN, detail=action.session_ref))
            events = self.emit_feedback_message(action.session_ref, actor, action.message)
            if action.conclude and thread.open:
                events += self.close_feedback(action.session_ref)
            return ActionOutcome(ok=True, events=events)

        if isinstance(action, HumanRequest):
            requested = RoleKind(action.action)
            try:
                rejection = self.authorize(actor, RoleKind.REQUEST, target=action.recipient, requested_action=requested)
            except UnknownMemberError:
                return reject(Rejection(rule=RULE_ADJACENCY_VIOLATION, detail=f"unknown member {action.recipient}"))
            if rejection:
                return reject(rejection)
            event = self.emit_request(actor, action.recipient, requested, action.text)
            return ActionOutcome(ok=True, events=[event])

        raise BadActionError(f"unsupported action: {action!r}")

    # --- scheduling --------------------------------------------------------------------

    def step(self) -> list[SessionEvent]:
        """Advance one quantum and tick every agent, in member-id order."""
        if self.ended:
            return []
        self.clock.advance()
        new_events: list[SessionEvent] = []
        for member_id in self._agent_order:
            new_events += tick(self.agents[member_id], self)
        return new_events

    def end(self) -> list[SessionEvent]:
        """Force-close open feedback threads, append the final event, seal the log."""
        if self.ended:
            return self.log
        for ref in sorted(self.feedback_sessions, key=lambda r: int(r.split("-")[1])):
            if self.feedback_sessions[ref].open:
                self.close_feedback(ref, forced=True)
        self.commit(ev.SessionEnded)
        self.ended = True
        return self.log

    # --- observable state (replay contract) ----------------------------------------

    def snapshot(self) -> dict:
        return _state_dict(
            session_id=self.session_id,
            config=self.config,
            board=self.board,
            gate_open=self.gate_open,
            phases={m: a.phase for m, a in self.agents.items()},
            threads=self.feedback_sessions,
            requests=self.requests,
            human_inbox=self.human_inbox,
            ended=self.ended,
            next_seq=self._seq,
        )


def start_session(
    config: TeamConfig,
    provider: Provider,
    seed: int = 0,
    time_scale: float = 1.0,
    session_id: Optional[str] = None,
) -> Session:
    """Validate the team and begin a session; every agent starts in Plan."""
    report = validate_team(config)
    if not report.ok:
        raise InvalidTeamError(report)
    if session_id is None:
        # Deterministic default so equal inputs produce byte-identical logs.
        from ._canon import digest

        session_id = "s-" + digest({"config": config.model_dump(mode="json"), "seed": seed, "time_scale": time_scale})[:12]
    session = Session(session_id, config, provider, seed, time_scale)
    session.commit(
        ev.SessionStarted,
        session_id=session_id,
        seed=seed,
        time_scale=time_scale,
        config=config,
    )
    logger.info("session %s started (%d agents)", session_id, len(session.agents))
    return session


# --- fold / replay -------------------------------------------------------------------

@dataclass
class FoldState:
    """Observable session state rebuilt purely from events."""

    session_id: str = ""
    config: Optional[TeamConfig] = None
    board: IdeaBoard = field(default_factory=IdeaBoard)
    gate_open: bool = False
    phases: dict = field(default_factory=dict)
    threads: dict = field(default_factory=dict)
    requests: dict = field(default_factory=dict)
    human_inbox: list = field(default_factory=list)
    ended: bool = False
    next_seq: int = 0

    def to_dict(self) -> dict:
        return _state_dict(
            session_id=self.session_id,
            config=self.config,
            board=self.board,
            gate_open=self.gate_open,
            phases=self.phases,
            threads=self.threads,
            requests=self.requests,
            human_inbox=self.human_inbox,
            ended=self.ended,
            next_seq=self.next_seq,
        )


def fold_events(events_list: list[SessionEvent]) -> FoldState:
    """Deterministically rebuild observable state from an event sequence."""
    state = FoldState()
    human_id: Optional[str] = None
    for event in events_list:
        if isinstance(event, ev.SessionStarted):
            state.session_id = event.session_id
            state.config = event.config
            human_id = event.config.human_id()
            state.phases = {m.member_id: AgentPhase.PLAN for m in event.config.agents()}
        elif isinstance(event, ev.IdeaGenerated):
            state.board.add_idea(event.idea)
            state.gate_open = True
        elif isinstance(event, ev.IdeaUpdated):
            state.board.add_idea(event.idea)
        elif isinstance(event, ev.IdeaEvaluated):
            state.board.add_evaluation(event.evaluation)
        elif isinstance(event, ev.FeedbackOpened):
            state.threads[event.session_ref] = FeedbackThread(
                ref=event.session_ref, initiator=event.initiator, recipient=event.recipient
            )
            if event.recipient == human_id:
                state.human_inbox.append(
                    {"kind": "feedback_opened", "ref": event.session_ref, "from": event.initiator, "at": event.at}
                )
        elif isinstance(event, ev.FeedbackMessage):
            thread = state.threads[event.session_ref]
            thread.turns.append((event.author, event.text))
            if thread.peer_of(event.author) == human_id:
                state.human_inbox.append(
                    {"kind": "feedback_message", "ref": event.session_ref, "from": event.author,
                     "text": event.text, "at": event.at}
                )
        elif isinstance(event, ev.FeedbackClosed):
            state.threads[event.session_ref].open = False
        elif isinstance(event, ev.RequestIssued):
            state.requests[event.request_ref] = RequestRecord(
                ref=event.request_ref, from_member=event.from_member,
                to_member=event.to_member, action=event.action, text=event.text,
            )
            if event.to_member == human_id:
                state.human_inbox.append(
                    {"kind": "request", "ref": event.request_ref, "from": event.from_member,
                     "action": event.action.value, "text": event.text, "at": event.at}
                )
        elif isinstance(event, ev.RequestFulfilled):
            state.requests[event.request_ref].fulfilled = True
        elif isinstance(event, ev.PhaseChanged):
            state.phases[event.member] = event.phase
        elif isinstance(event, ev.SessionEnded):
            state.ended = True
        state.next_seq = event.seq + 1
    return state


def _state_dict(*, session_id, config, board, gate_open, phases, threads, requests, human_inbox, ended, next_seq) -> dict:
    return {
        "session_id": session_id,
        "config_digest": config.digest() if config is not None else None,
        "board": board.to_json(),
        "gate_open": gate_open,
        "phases": {m: p.value for m, p in sorted(phases.items())},
        "threads": {
            ref: {"initiator": t.initiator, "recipient": t.recipient, "turns": list(t.turns), "open": t.open}
            for ref, t in sorted(threads.items())
        },
        "requests": {
            ref: {"from": r.from_member, "to": r.to_member, "action": r.action.value,
                  "text": r.text, "fulfilled": r.fulfilled}
            for ref, r in sorted(requests.items())
        },
        "human_inbox": list(human_inbox),
        "ended": ended,
        "next_seq": next_seq,
    }


def states_equal(a: dict, b: dict) -> bool:
    return canonical_dumps(a) == canonical_dumps(b)
