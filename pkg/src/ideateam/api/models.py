"""Request/response bodies for the HTTP API.

Error codes mirror the engine's rejection rules plus a small fixed set of
transport-level codes; the union is published via :data:`ERROR_CODES`.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..engine import REJECTION_RULES
from ..team import ValidationReport

API_ERROR_CODES = (
    "ValidationFailed",
    "NotFound",
    "NotSealed",
    "SessionEnded",
    "BadAction",
    "BadRequest",
)

ERROR_CODES = API_ERROR_CODES + REJECTION_RULES


class ApiError(BaseModel):
    code: str
    message: str
    details: Optional[dict] = None


class TeamCreated(BaseModel):
    team_id: str


class TeamRejected(BaseModel):
    code: str = "ValidationFailed"
    message: str = "team config failed validation"
    details: ValidationReport


class SessionCreated(BaseModel):
    session_id: str


class SessionStatus(BaseModel):
    session_id: str
    ended: bool
    gate_open: bool
    clock: float
    next_seq: int
    phases: dict[str, str]
    open_feedback_sessions: list[str] = Field(default_factory=list)


class ActionAccepted(BaseModel):
    ok: bool = True
    events: list[dict] = Field(default_factory=list)


class SessionSealed(BaseModel):
    sealed: bool = True
    events: int
