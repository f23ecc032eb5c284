"""Append-only session events: the single source of truth for replay and analytics.

Events are flat JSON objects tagged by ``type``; ``seq`` is gapless from 0 and
``at`` (virtual seconds) never decreases. Canonical encoding keeps equal logs
byte-identical.
"""

from __future__ import annotations

from enum import Enum
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from ._canon import canonical_dumps
from .ideas import Evaluation, Idea
from .team import RoleKind, TeamConfig


class AgentPhase(str, Enum):
    PLAN = "plan"
    ACT = "act"
    REFLECT = "reflect"
    WAIT = "wait"


class _Base(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    seq: int
    at: float

    def to_json(self) -> str:
        return canonical_dumps(self)


class SessionStarted(_Base):
    type: Literal["session_started"] = "session_started"
    session_id: str
    seed: int
    time_scale: float
    config: TeamConfig


class IdeaGenerated(_Base):
    type: Literal["idea_generated"] = "idea_generated"
    idea: Idea


class IdeaUpdated(_Base):
    type: Literal["idea_updated"] = "idea_updated"
    idea: Idea


class IdeaEvaluated(_Base):
    type: Literal["idea_evaluated"] = "idea_evaluated"
    evaluation: Evaluation


class FeedbackOpened(_Base):
    type: Literal["feedback_opened"] = "feedback_opened"
    session_ref: str
    initiator: str
    recipient: str


class FeedbackMessage(_Base):
    type: Literal["feedback_message"] = "feedback_message"
    session_ref: str
    author: str
    text: str


class FeedbackClosed(_Base):
    type: Literal["feedback_closed"] = "feedback_closed"
    session_ref: str
    forced: bool = False


class RequestIssued(_Base):
    type: Literal["request_issued"] = "request_issued"
    request_ref: str
    from_member: str = Field(alias="from")
    to_member: str = Field(alias="to")
    action: RoleKind
    text: str


class RequestFulfilled(_Base):
    type: Literal["request_fulfilled"] = "request_fulfilled"
    request_ref: str


class PhaseChanged(_Base):
    type: Literal["phase_changed"] = "phase_changed"
    member: str
    phase: AgentPhase


class ActionSkipped(_Base):
    type: Literal["action_skipped"] = "action_skipped"
    member: str
    reason: str


class ActionRejected(_Base):
    type: Literal["action_rejected"] = "action_rejected"
    actor: str
    rule: str
    detail: str = ""


class SessionEnded(_Base):
    type: Literal["session_ended"] = "session_ended"


SessionEvent = Annotated[
    Union[
        SessionStarted,
        IdeaGenerated,
        IdeaUpdated,
        IdeaEvaluated,
        FeedbackOpened,
        FeedbackMessage,
        FeedbackClosed,
        RequestIssued,
        RequestFulfilled,
        PhaseChanged,
        ActionSkipped,
        ActionRejected,
        SessionEnded,
    ],
    Field(discriminator="type"),
]

event_adapter: TypeAdapter = TypeAdapter(SessionEvent)


def parse_event(raw: Union[str, bytes, dict]) -> SessionEvent:
    if isinstance(raw, (str, bytes)):
        return event_adapter.validate_json(raw)
    return event_adapter.validate_python(raw)


# Events that represent a member doing something (vs. bracketing/bookkeeping).
ACTION_EVENT_TYPES = (
    "idea_generated",
    "idea_updated",
    "idea_evaluated",
    "feedback_message",
    "request_issued",
    "action_skipped",
)


def actor_of(event: SessionEvent) -> Union[str, None]:
    """The member an event is attributed to, if any."""
    if isinstance(event, (IdeaGenerated, IdeaUpdated)):
        return event.idea.author
    if isinstance(event, IdeaEvaluated):
        return event.evaluation.evaluator
    if isinstance(event, FeedbackOpened):
        return event.initiator
    if isinstance(event, FeedbackMessage):
        return event.author
    if isinstance(event, RequestIssued):
        return event.from_member
    if isinstance(event, (PhaseChanged, ActionSkipped)):
        return event.member
    if isinstance(event, ActionRejected):
        return event.actor
    return None
