"""The seven model-backed action pipelines.

Each pipeline assembles a prompt from the agent's standing profile, memory and
session context, then asks the provider for a schema-validated record. Prompts
carry machine-readable candidate lines (``Options:``, ``Candidate ideas:`` ...)
that double as grounding for real models and as the deterministic mock's
decision input. Ideation calls run hot (0.8); everything else runs at 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from .ideas import IdeaContent
from .memory import RequestItem, STRATEGY_KEYS
from .providers import (
    CompletionRequest,
    MalformedOutputError,
    Provider,
    ProviderError,
    ProviderTimeoutError,
    ProviderUnreachableError,
    complete_structured,
    register_schema,
)
from .team import REQUESTABLE_ROLES, RoleKind

BASE_TEMPERATURE = 0.5
CREATIVE_TEMPERATURE = 0.8

# Oldest long-term knowledge falls out of prompts beyond this budget.
KNOWLEDGE_CHAR_BUDGET = 2000


class PipelineFailure(Exception):
    """A provider-side failure; the action is skipped and the agent rests."""

    def __init__(self, reason: str, detail: str = "") -> None:
        super().__init__(detail or reason)
        self.reason = reason


class FeedbackDeferred(Exception):
    """No feedback counterpart is currently free; try again later.

    ``defer_to`` names a busy, feedback-capable agent whose queue can take the
    initiation as an implicit feedback request."""

    def __init__(self, member: str = "", defer_to: Optional[str] = None) -> None:
        super().__init__(member)
        self.defer_to = defer_to


# --- pipeline output schemas ---------------------------------------------------

class PlanDecision(BaseModel):
    model_config = ConfigDict(extra="forbid")

    chosen: Literal["idea_generation", "idea_evaluation", "feedback", "request", "wait"]
    rationale: str = ""


class GenerationDecision(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Literal["new", "update"]
    target: Optional[str] = None
    strategy: str = ""


class EvaluationTarget(BaseModel):
    model_config = ConfigDict(extra="forbid")

    idea_id: str


class EvaluationResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    novelty: int = Field(ge=1, le=7)
    completeness: int = Field(ge=1, le=7)
    quality: int = Field(ge=1, le=7)
    comment: Optional[str] = None


class FeedbackTargetChoice(BaseModel):
    model_config = ConfigDict(extra="forbid")

    recipient: str


class FeedbackTurn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    message: str = Field(min_length=1)
    conclude: bool = False


class RequestTargetChoice(BaseModel):
    model_config = ConfigDict(extra="forbid")

    recipient: str
    action: Literal["idea_generation", "idea_evaluation", "feedback"]


class RequestMessage(BaseModel):
    model_config = ConfigDict(extra="forbid")

    message: str = Field(min_length=1)


class ReflectionDelta(BaseModel):
    model_config = ConfigDict(extra="forbid")

    new_knowledge: list[str] = Field(default_factory=list)
    strategy_revisions: dict[str, str] = Field(default_factory=dict)
    relationship_updates: dict[str, str] = Field(default_factory=dict)


PLAN_SCHEMA = "plan_decision@1"
GENERATION_DECISION_SCHEMA = "generation_decision@1"
IDEA_CONTENT_SCHEMA = "idea_content@1"
EVALUATION_TARGET_SCHEMA = "evaluation_target@1"
EVALUATION_RESULT_SCHEMA = "evaluation_result@1"
FEEDBACK_TARGET_SCHEMA = "feedback_target@1"
FEEDBACK_TURN_SCHEMA = "feedback_turn@1"
REQUEST_DECISION_SCHEMA = "request_decision@1"
REQUEST_MESSAGE_SCHEMA = "request_message@1"
REFLECTION_SCHEMA = "reflection_delta@1"

register_schema(PLAN_SCHEMA, PlanDecision)
register_schema(GENERATION_DECISION_SCHEMA, GenerationDecision)
register_schema(IDEA_CONTENT_SCHEMA, IdeaContent)
register_schema(EVALUATION_TARGET_SCHEMA, EvaluationTarget)
register_schema(EVALUATION_RESULT_SCHEMA, EvaluationResult)
register_schema(FEEDBACK_TARGET_SCHEMA, FeedbackTargetChoice)
register_schema(FEEDBACK_TURN_SCHEMA, FeedbackTurn)
register_schema(REQUEST_DECISION_SCHEMA, RequestTargetChoice)
register_schema(REQUEST_MESSAGE_SCHEMA, RequestMessage)
register_schema(REFLECTION_SCHEMA, ReflectionDelta)

# Schemas whose calls run at the creative temperature.
CREATIVE_SCHEMAS = {GENERATION_DECISION_SCHEMA, IDEA_CONTENT_SCHEMA}


@dataclass
class RequestDecision:
    recipient: str
    action: RoleKind
    message: str


# Two neutral few-shot exemplars for the four-part idea representation.
OFBS_EXEMPLARS = (
    IdeaContent(
        title="Modular desk organizer",
        object="A reconfigurable desk organizer for small workspaces",
        function="Keeps frequently used tools visible and reachable without clutter",
        behavior="Snap-together trays rearrange in seconds as the task at hand changes",
        structure="Interlocking trays on a weighted base rail with magnetic joints",
    ),
    IdeaContent(
        title="Neighborhood tool library",
        object="A shared lending service for rarely used household tools",
        function="Cuts household cost and waste by pooling seldom-used equipment",
        behavior="Members reserve online, pick up from a locker, and return within days",
        structure="Booking app, smart lockers at community hubs, volunteer maintenance pool",
    ),
)


# --- prompt assembly -----------------------------------------------------------

def _feedback_taxonomy_section() -> str:
    # Placeholder taxonomy: strengths / risks / suggestions / questions.
    return (
        "When giving feedback, cover in order: what is strong about the idea, "
        "what risks or gaps you see, one concrete suggestion, and one question "
        "that would move the idea forward."
    )


def _recent_actions_section(agent) -> str:
    if not agent.stm.recent_actions:
        return "Your recent actions: none yet."
    lines = [f"- {r.kind}: {r.detail}" for r in agent.stm.recent_actions]
    return "Your recent actions (oldest first):\n" + "\n".join(lines)


def _knowledge_section(agent) -> str:
    entries = list(agent.ltm.design_knowledge)
    kept: list[str] = []
    used = 0
    for entry in reversed(entries):  # newest first; oldest dropped beyond budget
        if used + len(entry) > KNOWLEDGE_CHAR_BUDGET and kept:
            break
        kept.append(entry)
        used += len(entry)
    if not kept:
        return "Design knowledge so far: none."
    return "Design knowledge so far:\n" + "\n".join(f"- {e}" for e in reversed(kept))


def _strategy_section(agent, key: str) -> str:
    strategy = agent.ltm.action_strategies.get(key)
    return f"Your current {key} strategy: {strategy}" if strategy else ""


def _relationships_section(agent, member_ids: list[str]) -> str:
    lines = []
    for mid in member_ids:
        rel = agent.ltm.relationships.get(mid)
        if rel is None:
            continue
        note = f" Note: {rel.responsiveness_note}" if rel.responsiveness_note else ""
        lines.append(f"- {mid}: {rel.belief} ({rel.interactions} interactions so far.{note})")
    return "What you know about them:\n" + "\n".join(lines) if lines else ""


def _board_section(session) -> str:
    if not len(session.board):
        return "Existing ideas: none"
    listing = "\n".join(
        f"- {i.idea_id}: {i.title} (by {i.author})" for i in session.board.ideas
    )
    ids = ", ".join(i.idea_id for i in session.board.ideas)
    return f"Idea board:\n{listing}\nExisting ideas: {ids}"


def _request_section(request: Optional[RequestItem]) -> str:
    if request is None:
        return ""
    return (
        f"You are acting on a request from {request.from_member} "
        f"(requested action: {request.action.value}).\nRequest details: {request.text}"
    )


def _compose(*sections: str) -> str:
    return "\n\n".join(s for s in sections if s)


def _call(provider: Provider, agent, schema_id: str, user_prompt: str, max_tokens: int = 500, extra_check=None):
    temperature = CREATIVE_TEMPERATURE if schema_id in CREATIVE_SCHEMAS else BASE_TEMPERATURE
    request = CompletionRequest(
        system_prompt=agent.profile_prompt,
        user_prompt=user_prompt,
        temperature=temperature,
        schema_id=schema_id,
        max_tokens=max_tokens,
    )
    try:
        return complete_structured(provider, request, extra_check)
    except MalformedOutputError as exc:
        raise PipelineFailure("malformed_output", str(exc)) from exc
    except ProviderTimeoutError as exc:
        raise PipelineFailure("provider_timeout", str(exc)) from exc
    except ProviderUnreachableError as exc:
        raise PipelineFailure("provider_unreachable", str(exc)) from exc
    except ProviderError as exc:
        raise PipelineFailure("provider_error", str(exc)) from exc


# --- the seven pipelines -------------------------------------------------------

def run_plan(agent, session, options: list[RoleKind]) -> PlanDecision:
    """Pick the next action (or wait) from the currently legal options."""
    option_values = [o.value for o in options]
    allowed = set(option_values) | {"wait"}
    prompt = _compose(
        "Decide your next action. Pick one of the listed options, or wait if "
        "none of them would help the team right now. Give a short rationale.",
        _recent_actions_section(agent),
        _knowledge_section(agent),
        _strategy_section(agent, "plan"),
        f"Options: {', '.join(option_values)}",
    )
    decision = _call(
        session.provider,
        agent,
        PLAN_SCHEMA,
        prompt,
        max_tokens=300,
        extra_check=lambda d: None if d.chosen in allowed else f"chosen must be one of: {sorted(allowed)}",
    )
    return decision


def run_generation(
    agent, session, request: Optional[RequestItem] = None
) -> tuple[GenerationDecision, IdeaContent]:
    """Decide new-vs-update, then produce the idea content (both calls run hot)."""
    board = session.board
    existing_ids = {i.idea_id for i in board.ideas}

    def check_decision(d: GenerationDecision) -> Optional[str]:
        if d.mode == "update":
            if not existing_ids:
                return "mode must be new: the board is empty"
            if d.target not in existing_ids:
                return f"target must be an existing idea id: {sorted(existing_ids)}"
        return None

    decision_prompt = _compose(
        "Choose your ideation strategy: create a brand-new idea, or develop an "
        "existing one using its representation as the template.",
        f"Topic: {session.config.topic}",
        _board_section(session),
        _knowledge_section(agent),
        _strategy_section(agent, "idea_generation"),
        _request_section(request),
    )
    decision = _call(
        session.provider, agent, GENERATION_DECISION_SCHEMA, decision_prompt,
        max_tokens=300, extra_check=check_decision,
    )

    exemplars = "\n\n".join(
        "Example idea:\n" + ex.model_dump_json(indent=None) for ex in OFBS_EXEMPLARS
    )
    if decision.mode == "update":
        template = board.get(decision.target)
        mode_section = _compose(
            "Mode: update",
            f"Template idea id: {template.idea_id}",
            "Template idea: " + template.model_dump_json(),
            "Build on the template above: keep what works, refine the rest.",
        )
    else:
        mode_section = "Mode: new\nCreate an original concept; do not copy existing board ideas."
    content_prompt = _compose(
        "Write one idea as a JSON object with title, object, function, behavior "
        "and structure fields. Every field must be non-empty and concrete.",
        f"Topic: {session.config.topic}",
        f"Strategy: {decision.strategy}",
        exemplars,
        mode_section,
        _request_section(request),
    )
    content = _call(
        session.provider, agent, IDEA_CONTENT_SCHEMA, content_prompt, max_tokens=700,
        extra_check=lambda c: None
        if all(getattr(c, f).strip() for f in ("object", "function", "behavior", "structure"))
        else "object, function, behavior and structure must all be non-empty",
    )
    return decision, content


def run_evaluation(
    agent, session, request: Optional[RequestItem] = None
) -> tuple[str, EvaluationResult]:
    """Select a target idea, then score it on the three 7-point criteria."""
    board = session.board
    if not len(board):
        raise PipelineFailure("nothing_to_evaluate", "the idea board is empty")
    candidate_ids = [i.idea_id for i in board.ideas]

    target_prompt = _compose(
        "Pick the idea most worth evaluating right now.",
        _board_section(session),
        f"Candidate ideas: {', '.join(candidate_ids)}",
        _knowledge_section(agent),
        _strategy_section(agent, "idea_evaluation"),
        _request_section(request),
    )
    target = _call(
        session.provider, agent, EVALUATION_TARGET_SCHEMA, target_prompt,
        max_tokens=200,
        extra_check=lambda t: None if t.idea_id in candidate_ids else f"idea_id must be one of: {candidate_ids}",
    )

    idea = board.get(target.idea_id)
    result_prompt = _compose(
        "Evaluate the target idea. Rate novelty, completeness and quality on "
        "1-7 scales and add a short summary comment.",
        f"Target idea: {idea.idea_id}",
        "Idea under evaluation: " + idea.model_dump_json(),
        _request_section(request),
    )
    result = _call(session.provider, agent, EVALUATION_RESULT_SCHEMA, result_prompt, max_tokens=400)
    return target.idea_id, result


def run_feedback_initiation(
    agent, session, request: Optional[RequestItem] = None
) -> tuple[str, FeedbackTurn]:
    """Pick a free, adjacent recipient and write the opening feedback message."""
    if session.busy_in_feedback(agent.member_id):
        raise FeedbackDeferred(agent.member_id)
    neighbors = session.config.neighbors(agent.member_id)
    candidates = [m for m in neighbors if not session.busy_in_feedback(m)]
    if not candidates:
        # Everyone reachable is mid-conversation: hand the initiation to the
        # first busy agent that could host it once free.
        busy_hosts = [
            m for m in neighbors
            if m in session.agents and session.config.member(m).has_role(RoleKind.FEEDBACK)
        ]
        raise FeedbackDeferred(agent.member_id, defer_to=busy_hosts[0] if busy_hosts else None)

    target_prompt = _compose(
        "Choose which directly connected teammate to open a one-on-one feedback "
        "conversation with.",
        f"Candidate recipients: {', '.join(candidates)}",
        _relationships_section(agent, candidates),
        _board_section(session),
        _strategy_section(agent, "feedback"),
        _request_section(request),
    )
    choice = _call(
        session.provider, agent, FEEDBACK_TARGET_SCHEMA, target_prompt,
        max_tokens=200,
        extra_check=lambda c: None if c.recipient in candidates else f"recipient must be one of: {candidates}",
    )

    opening_prompt = _compose(
        "Write the opening message of the feedback conversation.",
        _feedback_taxonomy_section(),
        f"Recipient: {choice.recipient}",
        "Turns so far: 0",
        _board_section(session),
        _request_section(request),
    )
    turn = _call(session.provider, agent, FEEDBACK_TURN_SCHEMA, opening_prompt, max_tokens=400)
    # An opening never concludes, whatever the model said.
    return choice.recipient, FeedbackTurn(message=turn.message, conclude=False)


def run_feedback_response(agent, session, thread) -> FeedbackTurn:
    """Write the next turn of an open conversation and decide whether to close it."""
    peer = thread.peer_of(agent.member_id)
    transcript = "\n".join(f"[{author}] {text}" for author, text in thread.turns)
    prompt = _compose(
        "You are in an open feedback conversation. Reply to the latest message. "
        "Set conclude to true when the exchange has run its course.",
        _feedback_taxonomy_section(),
        f"Recipient: {peer}",
        f"Turns so far: {len(thread.turns)}",
        "Conversation so far:\n" + transcript,
    )
    return _call(session.provider, agent, FEEDBACK_TURN_SCHEMA, prompt, max_tokens=400)


def run_request(agent, session) -> RequestDecision:
    """Pick an adjacent recipient and a requestable action they actually hold."""
    candidates: dict[str, list[str]] = {}
    for mid in session.config.neighbors(agent.member_id):
        member = session.config.member(mid)
        requestable = [r.value for r in REQUESTABLE_ROLES if member.has_role(r)]
        if requestable:
            candidates[mid] = requestable
    if not candidates:
        raise PipelineFailure("no_request_candidates", "no adjacent member holds a requestable role")

    candidate_line = ", ".join(f"{m}={'|'.join(roles)}" for m, roles in candidates.items())

    def check(choice: RequestTargetChoice) -> Optional[str]:
        if choice.recipient not in candidates:
            return f"recipient must be one of: {sorted(candidates)}"
        if choice.action not in candidates[choice.recipient]:
            return f"{choice.recipient} can only be asked for: {candidates[choice.recipient]}"
        return None

    decision_prompt = _compose(
        "Decide whom to ask for help and which action to request. The action "
        "must be one the recipient is allowed to perform.",
        f"Request candidates: {candidate_line}",
        _relationships_section(agent, list(candidates)),
        _board_section(session),
        _strategy_section(agent, "request"),
    )
    choice = _call(
        session.provider, agent, REQUEST_DECISION_SCHEMA, decision_prompt,
        max_tokens=200, extra_check=check,
    )

    message_prompt = _compose(
        "Write a short, specific request message for your teammate.",
        f"Recipient: {choice.recipient}",
        f"Requested action: {choice.action}",
        _board_section(session),
    )
    message = _call(session.provider, agent, REQUEST_MESSAGE_SCHEMA, message_prompt, max_tokens=300)
    return RequestDecision(
        recipient=choice.recipient,
        action=RoleKind(choice.action),
        message=message.message,
    )


def run_reflection(agent, session, trigger) -> ReflectionDelta:
    """Digest one trigger into knowledge, strategy revisions, and relationship notes."""
    adjacent = set(session.config.neighbors(agent.member_id))
    involved = [m for m in trigger.involved() if m in adjacent]

    def check(delta: ReflectionDelta) -> Optional[str]:
        stray = [k for k in delta.relationship_updates if k not in involved]
        if stray:
            return f"relationship updates only for involved adjacent members {involved}, not {stray}"
        bad_keys = [k for k in delta.strategy_revisions if k not in STRATEGY_KEYS]
        if bad_keys:
            return f"strategy keys must be among {list(STRATEGY_KEYS)}"
        return None

    prompt = _compose(
        "Reflect on what just happened. Extract new design knowledge, revise "
        "your action strategies where warranted, and update what you believe "
        "about the involved teammates.",
        f"Trigger kind: {trigger.kind}",
        trigger.describe(),
        f"Involved members: {', '.join(involved) if involved else 'none'}",
        _knowledge_section(agent),
    )
    return _call(session.provider, agent, REFLECTION_SCHEMA, prompt, max_tokens=500, extra_check=check)
