"""Two-tier agent memory: a transient short-term window and durable long-term stores."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Optional

from .team import RoleKind

RECENT_ACTION_LIMIT = 5


@dataclass
class ActionRecord:
    at: float
    kind: str
    detail: str


@dataclass
class RequestItem:
    ref: str
    from_member: str
    action: RoleKind
    text: str
    # Implicit items are queue-state only (e.g. a deferred feedback initiation);
    # they never appear in the event log as issued or fulfilled requests.
    implicit: bool = False


@dataclass
class ShortTermMemory:
    """Recent-action ring (at most 5), FIFO request queue, active feedback slot."""

    recent_actions: Deque[ActionRecord] = field(default_factory=lambda: deque(maxlen=RECENT_ACTION_LIMIT))
    pending_requests: list[RequestItem] = field(default_factory=list)
    active_feedback: Optional[str] = None  # session_ref of the one open thread


def record_action(stm: ShortTermMemory, record: ActionRecord) -> None:
    """Append to the ring; the oldest record falls out beyond the limit."""
    stm.recent_actions.append(record)


@dataclass
class Relationship:
    belief: str
    interactions: int = 0
    responsiveness_note: str = ""


@dataclass
class LongTermMemory:
    """Accumulated design knowledge, per-action strategies, and working beliefs
    about adjacent teammates. Relationship keys never leave the adjacency set."""

    design_knowledge: list[str] = field(default_factory=list)
    action_strategies: dict[str, str] = field(default_factory=dict)
    relationships: dict[str, Relationship] = field(default_factory=dict)

STRATEGY_KEYS = tuple(r.value for r in RoleKind) + ("plan",)
