"""Scripted human policies for headless simulation.

A policy is a timed script of human actions plus optional reactive rules that
answer observed events. Placeholders keep presets config-agnostic:

- ``$adjacent:<role>`` resolves to the first agent adjacent to the human that
  holds the role;
- ``$event.<path>`` pulls a field out of the event a reactive rule matched;
- match values ``$human`` / ``$not_human`` compare against the human's id.

Three presets mirror observed operator styles: ``evaluator`` (rates every new
agent idea), ``requester`` (periodically asks for generation/evaluation), and
``passive`` (watches only). All are constructions for fixtures, not data.
"""

from __future__ import annotations

import json
import logging
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from .engine import HumanAction, Session
from .events import SessionEvent
from .team import RoleKind, TeamConfig

logger = logging.getLogger(__name__)

PRESETS = ("evaluator", "requester", "passive")

_action_adapter: TypeAdapter = TypeAdapter(HumanAction)


class ScriptedAction(BaseModel):
    model_config = ConfigDict(extra="forbid")

    at: float = Field(ge=0)
    action: dict


class ReactiveRule(BaseModel):
    model_config = ConfigDict(extra="forbid")

    on: dict
    respond: dict
    limit: Optional[int] = Field(default=None, ge=1)


class HumanPolicy(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "unnamed"
    script: list[ScriptedAction] = Field(default_factory=list)
    reactive: list[ReactiveRule] = Field(default_factory=list)

    @model_validator(mode="after")
    def _times_non_decreasing(self) -> "HumanPolicy":
        times = [entry.at for entry in self.script]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("script times must be non-decreasing")
        return self


def load_policy(name_or_path: str) -> HumanPolicy:
    """Load a preset by name or a policy JSON file by path."""
    if name_or_path in PRESETS:
        raw = resources.files("ideateam").joinpath("policy_presets", f"{name_or_path}.json").read_text("utf-8")
    else:
        raw = Path(name_or_path).read_text(encoding="utf-8")
    return HumanPolicy.model_validate_json(raw)


def _adjacent_with_role(config: TeamConfig, role: RoleKind) -> Optional[str]:
    human = config.human_id()
    for member_id in config.neighbors(human):
        member = config.member(member_id)
        if member.kind.value == "agent" and member.has_role(role):
            return member_id
    return None


def _event_field(event: SessionEvent, path: str) -> Any:
    node: Any = event.model_dump(mode="json", by_alias=True)
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def _resolve_value(value: Any, config: TeamConfig, event: Optional[SessionEvent]) -> Any:
    if not isinstance(value, str):
        return value
    if value.startswith("$adjacent:"):
        return _adjacent_with_role(config, RoleKind(value.split(":", 1)[1]))
    if value.startswith("$event.") and event is not None:
        return _event_field(event, value[len("$event."):])
    return value


def _matches(rule_on: dict, event: SessionEvent, human_id: str) -> bool:
    for key, expected in rule_on.items():
        actual = _event_field(event, key)
        if expected == "$human":
            if actual != human_id:
                return False
        elif expected == "$not_human":
            if actual is None or actual == human_id:
                return False
        elif actual != expected:
            return False
    return True


class PolicyRunner:
    """Drives one policy against a live session deterministically."""

    def __init__(self, policy: HumanPolicy, config: TeamConfig) -> None:
        self.policy = policy
        self.config = config
        self.human_id = config.human_id()
        self._script_cursor = 0
        self._fired: dict[int, int] = {}

    def _build(self, raw: dict, event: Optional[SessionEvent] = None) -> Optional[HumanAction]:
        resolved = {k: _resolve_value(v, self.config, event) for k, v in raw.items()}
        if any(v is None and isinstance(raw[k], str) and raw[k].startswith("$") for k, v in resolved.items()):
            logger.warning("policy action skipped: unresolvable placeholder in %r", raw)
            return None
        try:
            return _action_adapter.validate_python(resolved)
        except ValidationError as exc:
            logger.warning("policy action skipped: %s", exc)
            return None

    def due_actions(self, now: float) -> list[HumanAction]:
        actions: list[HumanAction] = []
        while self._script_cursor < len(self.policy.script):
            entry = self.policy.script[self._script_cursor]
            if entry.at > now:
                break
            self._script_cursor += 1
            action = self._build(entry.action)
            if action is not None:
                actions.append(action)
        return actions

    def reactions(self, new_events: list[SessionEvent]) -> list[HumanAction]:
        actions: list[HumanAction] = []
        for event in new_events:
            for index, rule in enumerate(self.policy.reactive):
                if rule.limit is not None and self._fired.get(index, 0) >= rule.limit:
                    continue
                if not _matches(rule.on, event, self.human_id):
                    continue
                action = self._build(rule.respond, event)
                if action is None:
                    continue
                self._fired[index] = self._fired.get(index, 0) + 1
                actions.append(action)
        return actions


def run_simulation(
    session: Session,
    policy: HumanPolicy,
    duration: float,
    after_step=None,
) -> list[SessionEvent]:
    """Step a session to the duration, feeding in policy actions; seals the log.

    ``after_step`` is a test hook called after each quantum with the session.
    """
    runner = PolicyRunner(policy, session.config)
    pending: list[SessionEvent] = list(session.log)
    while session.clock.now() < duration and not session.ended:
        fresh: list[SessionEvent] = []
        for action in runner.reactions(pending):
            fresh += session.submit_human_action(action).events
        for action in runner.due_actions(session.clock.now()):
            fresh += session.submit_human_action(action).events
        fresh += session.step()
        pending = fresh
        if after_step is not None:
            after_step(session)
    return session.end()
