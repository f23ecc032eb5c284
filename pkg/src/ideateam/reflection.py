"""Post-session analytics over sealed event logs, plus cross-config formation
statistics. Every statistic is a pure function of its inputs and is checked in
the test suite against an independent brute-force recomputation.

Text lengths are measured in characters. Standard deviations are population
standard deviations (noted in output metadata).
"""

from __future__ import annotations

from statistics import pstdev
from typing import Optional, Sequence

from pydantic import BaseModel, Field

from . import events as ev
from .engine import fold_events
from .events import SessionEvent
from .ideas import Idea
from .team import MemberKind, RoleKind, StructureClass, TeamConfig, classify_structure

SD_KIND = "population"


class NotSealedError(ValueError):
    """Reflection runs over sealed logs only."""


class EmptyInputError(ValueError):
    pass


class PairingError(ValueError):
    """Logs and configs lists do not pair up."""


def _ensure_sealed(log: Sequence[SessionEvent]) -> None:
    if not log or not isinstance(log[-1], ev.SessionEnded):
        raise NotSealedError("log is not sealed (no closing event)")


def _mean(values: Sequence[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def _sd(values: Sequence[float]) -> Optional[float]:
    return pstdev(values) if values else None


class SessionSummary(BaseModel):
    participants: int
    total_ideas: int
    evaluations: int
    feedback_sessions: int
    requests: int


def summarize(log: Sequence[SessionEvent]) -> SessionSummary:
    """Direct event tallies: ideas count creations plus updates."""
    _ensure_sealed(log)
    config = _config_of(log)
    counts = {"ideas": 0, "evaluations": 0, "feedback": 0, "requests": 0}
    for event in log:
        if isinstance(event, (ev.IdeaGenerated, ev.IdeaUpdated)):
            counts["ideas"] += 1
        elif isinstance(event, ev.IdeaEvaluated):
            counts["evaluations"] += 1
        elif isinstance(event, ev.FeedbackClosed):
            counts["feedback"] += 1
        elif isinstance(event, ev.RequestIssued):
            counts["requests"] += 1
    return SessionSummary(
        participants=len(config.members),
        total_ideas=counts["ideas"],
        evaluations=counts["evaluations"],
        feedback_sessions=counts["feedback"],
        requests=counts["requests"],
    )


def _config_of(log: Sequence[SessionEvent]) -> TeamConfig:
    first = log[0]
    if not isinstance(first, ev.SessionStarted):
        raise NotSealedError("log does not begin with the opening event")
    return first.config


class MemberActivityRow(BaseModel):
    idea_generation: int = 0
    idea_evaluation: int = 0
    feedback_sessions: int = 0
    requests: int = 0


def member_activity(log: Sequence[SessionEvent]) -> dict[str, MemberActivityRow]:
    """Per-member action counts; feedback counts once per closed session joined,
    so member feedback counts sum to twice the session total."""
    _ensure_sealed(log)
    config = _config_of(log)
    rows = {m.member_id: MemberActivityRow() for m in config.members}
    thread_parties: dict[str, tuple[str, str]] = {}
    for event in log:
        if isinstance(event, (ev.IdeaGenerated, ev.IdeaUpdated)):
            rows[event.idea.author].idea_generation += 1
        elif isinstance(event, ev.IdeaEvaluated):
            rows[event.evaluation.evaluator].idea_evaluation += 1
        elif isinstance(event, ev.FeedbackOpened):
            thread_parties[event.session_ref] = (event.initiator, event.recipient)
        elif isinstance(event, ev.FeedbackClosed):
            for party in thread_parties[event.session_ref]:
                rows[party].feedback_sessions += 1
        elif isinstance(event, ev.RequestIssued):
            rows[event.from_member].requests += 1
    return rows


class FlowCell(BaseModel):
    from_member: str = Field(alias="from")
    to_member: str = Field(alias="to")
    count: int

    model_config = {"populate_by_name": True}


class FlowMatrix(BaseModel):
    kind: str  # "feedback" | "request"
    cells: list[FlowCell]


def flow(log: Sequence[SessionEvent], kind: RoleKind) -> FlowMatrix:
    """Directed interaction counts: feedback by (initiator, recipient) of closed
    sessions, requests by (from, to)."""
    _ensure_sealed(log)
    if kind not in (RoleKind.FEEDBACK, RoleKind.REQUEST):
        raise ValueError("flow kind must be feedback or request")
    pairs: dict[tuple[str, str], int] = {}
    thread_parties: dict[str, tuple[str, str]] = {}
    for event in log:
        if kind is RoleKind.FEEDBACK:
            if isinstance(event, ev.FeedbackOpened):
                thread_parties[event.session_ref] = (event.initiator, event.recipient)
            elif isinstance(event, ev.FeedbackClosed):
                pair = thread_parties[event.session_ref]
                pairs[pair] = pairs.get(pair, 0) + 1
        else:
            if isinstance(event, ev.RequestIssued):
                pair = (event.from_member, event.to_member)
                pairs[pair] = pairs.get(pair, 0) + 1
    cells = [
        FlowCell(from_member=a, to_member=b, count=n)
        for (a, b), n in sorted(pairs.items())
    ]
    return FlowMatrix(kind=kind.value, cells=cells)


# Event types the timeline shows by default (phase changes excluded).
TIMELINE_TYPES = (
    "idea_generated",
    "idea_updated",
    "idea_evaluated",
    "feedback_opened",
    "feedback_message",
    "feedback_closed",
    "request_issued",
    "request_fulfilled",
    "action_skipped",
    "action_rejected",
)


class TimelineEntry(BaseModel):
    seq: int
    at: float
    type: str
    actors: list[str]
    description: str


def timeline(
    log: Sequence[SessionEvent],
    member_filter: Optional[str] = None,
    include_phases: bool = False,
) -> list[TimelineEntry]:
    """Chronological, human-readable entries; filterable to one member's
    involvement (as actor or feedback party)."""
    _ensure_sealed(log)
    thread_parties: dict[str, tuple[str, str]] = {}
    request_parties: dict[str, tuple[str, str]] = {}
    entries: list[TimelineEntry] = []
    for event in log:
        if isinstance(event, ev.FeedbackOpened):
            thread_parties[event.session_ref] = (event.initiator, event.recipient)
        elif isinstance(event, ev.RequestIssued):
            request_parties[event.request_ref] = (event.from_member, event.to_member)
        entry = _timeline_entry(event, thread_parties, request_parties, include_phases)
        if entry is None:
            continue
        if member_filter is not None and member_filter not in entry.actors:
            continue
        entries.append(entry)
    return entries


def _timeline_entry(event, thread_parties, request_parties, include_phases) -> Optional[TimelineEntry]:
    actors: list[str]
    if isinstance(event, (ev.IdeaGenerated, ev.IdeaUpdated)):
        verb = "updated" if isinstance(event, ev.IdeaUpdated) else "created"
        actors = [event.idea.author]
        description = f'{event.idea.author} {verb} idea {event.idea.idea_id}: "{event.idea.title}"'
    elif isinstance(event, ev.IdeaEvaluated):
        e = event.evaluation
        actors = [e.evaluator]
        description = (
            f"{e.evaluator} evaluated {e.idea_id} "
            f"(novelty {e.novelty}, completeness {e.completeness}, quality {e.quality})"
        )
    elif isinstance(event, ev.FeedbackOpened):
        actors = [event.initiator, event.recipient]
        description = f"{event.initiator} opened a feedback session with {event.recipient}"
    elif isinstance(event, ev.FeedbackMessage):
        parties = thread_parties.get(event.session_ref, (event.author,))
        actors = list(parties)
        description = f"{event.author} sent feedback in {event.session_ref}"
    elif isinstance(event, ev.FeedbackClosed):
        parties = thread_parties.get(event.session_ref, ())
        actors = list(parties)
        joined = " and ".join(parties) if parties else event.session_ref
        description = f"{joined} completed a feedback session"
    elif isinstance(event, ev.RequestIssued):
        actors = [event.from_member, event.to_member]
        description = f"{event.from_member} asked {event.to_member} for {event.action.value}"
    elif isinstance(event, ev.RequestFulfilled):
        parties = request_parties.get(event.request_ref, ())
        actors = list(parties)
        description = f"request {event.request_ref} fulfilled"
    elif isinstance(event, ev.ActionSkipped):
        actors = [event.member]
        description = f"{event.member} skipped an action ({event.reason})"
    elif isinstance(event, ev.ActionRejected):
        actors = [event.actor]
        description = f"{event.actor} was stopped by rule {event.rule}"
    elif isinstance(event, ev.PhaseChanged) and include_phases:
        actors = [event.member]
        description = f"{event.member} entered {event.phase.value}"
    else:
        return None
    return TimelineEntry(
        seq=event.seq, at=event.at, type=event.type, actors=actors, description=description
    )


class RankedIdea(BaseModel):
    idea: Idea
    author: str
    mean_rating: Optional[float]
    evaluation_count: int


def rank_ideas(log: Sequence[SessionEvent]) -> list[RankedIdea]:
    """All ideas sorted by pooled mean rating descending; ties break on earlier
    creation; unevaluated ideas keep creation order at the end."""
    _ensure_sealed(log)
    board = fold_events(list(log)).board
    rated: list[RankedIdea] = []
    unrated: list[RankedIdea] = []
    for idea in board.ideas:
        mean = board.mean_rating(idea.idea_id)
        entry = RankedIdea(
            idea=idea,
            author=idea.author,
            mean_rating=mean,
            evaluation_count=len(board.evaluations_of(idea.idea_id)),
        )
        (rated if mean is not None else unrated).append(entry)
    rated.sort(key=lambda r: (-r.mean_rating, r.idea.created_at))
    return rated + unrated


# --- formation statistics (cross-config) ----------------------------------------------


class MeanSd(BaseModel):
    mean: Optional[float]
    sd: Optional[float]
    n: int

    @classmethod
    def of(cls, values: Sequence[float]) -> "MeanSd":
        return cls(mean=_mean(values), sd=_sd(values), n=len(values))


class PersonaCompletion(BaseModel):
    human_pct: Optional[float]
    agents_social_pct: Optional[float]
    agents_personal_pct: Optional[float]
    agents_life_context_pct: Optional[float]


class FormationCycleStats(BaseModel):
    teams: int
    size: MeanSd
    structure_counts: dict[str, int]
    roles_per_member_all: MeanSd
    roles_per_member_agents: MeanSd
    roles_per_member_human: MeanSd
    agents_per_role: dict[str, MeanSd]
    persona_completion: PersonaCompletion
    smm_length_chars: MeanSd


class FormationStats(BaseModel):
    sd_kind: str = SD_KIND
    cycles: list[FormationCycleStats]
    total: FormationCycleStats


_SOCIAL_ATTRS = ("age", "gender", "education", "occupation")
_PERSONAL_ATTRS = ("personality", "skills")
_LIFE_ATTRS = ("work_style", "likes", "dislikes")


def _filled(value) -> bool:
    if value is None:
        return False
    if isinstance(value, str):
        return bool(value.strip())
    return True


def _completion_pct(members, sections: dict[str, tuple[str, ...]]) -> Optional[float]:
    filled = 0
    total = 0
    for member in members:
        for section_name, attrs in sections.items():
            section = getattr(member.persona, section_name)
            for attr in attrs:
                total += 1
                filled += _filled(getattr(section, attr))
    return 100.0 * filled / total if total else None


def _formation_cycle(configs: Sequence[TeamConfig]) -> FormationCycleStats:
    sizes = [len(c.members) for c in configs]
    structure_counts = {s.value: 0 for s in StructureClass}
    for c in configs:
        structure_counts[classify_structure(c).value] += 1

    all_roles = [len(m.roles) for c in configs for m in c.members]
    agent_roles = [len(m.roles) for c in configs for m in c.agents()]
    human_roles = [len(m.roles) for c in configs for m in c.humans()]

    agents_per_role = {}
    for role in RoleKind:
        counts = [sum(1 for m in c.agents() if m.has_role(role)) for c in configs]
        agents_per_role[role.value] = MeanSd.of(counts)

    humans = [m for c in configs for m in c.humans()]
    agents = [m for c in configs for m in c.agents()]
    completion = PersonaCompletion(
        human_pct=_completion_pct(
            humans,
            {"social": _SOCIAL_ATTRS, "personal": _PERSONAL_ATTRS, "life_context": _LIFE_ATTRS},
        ),
        agents_social_pct=_completion_pct(agents, {"social": _SOCIAL_ATTRS}),
        agents_personal_pct=_completion_pct(agents, {"personal": _PERSONAL_ATTRS}),
        agents_life_context_pct=_completion_pct(agents, {"life_context": _LIFE_ATTRS}),
    )

    smm_lengths = [c.smm.combined_length() for c in configs]
    return FormationCycleStats(
        teams=len(configs),
        size=MeanSd.of(sizes),
        structure_counts=structure_counts,
        roles_per_member_all=MeanSd.of(all_roles),
        roles_per_member_agents=MeanSd.of(agent_roles),
        roles_per_member_human=MeanSd.of(human_roles),
        agents_per_role=agents_per_role,
        persona_completion=completion,
        smm_length_chars=MeanSd.of(smm_lengths),
    )


def formation_stats(cycles: Sequence[Sequence[TeamConfig]]) -> FormationStats:
    """Descriptive statistics of formation dimensions, per cycle plus a total."""
    if not cycles or any(not cycle for cycle in cycles):
        raise EmptyInputError("each cycle needs at least one config")
    per_cycle = [_formation_cycle(list(cycle)) for cycle in cycles]
    pooled = [config for cycle in cycles for config in cycle]
    return FormationStats(cycles=per_cycle, total=_formation_cycle(pooled))


# --- ideation statistics (per sealed log) ----------------------------------------------


class GenerationStats(BaseModel):
    count: int
    per_member: MeanSd
    text_length_chars: MeanSd


class EvaluationStats(BaseModel):
    count: int
    per_member: MeanSd
    comment_length_chars: MeanSd
    rating_novelty_mean: Optional[float]
    rating_completeness_mean: Optional[float]
    rating_quality_mean: Optional[float]


class FeedbackStats(BaseModel):
    session_count: int
    per_member: MeanSd
    message_length_chars: MeanSd
    turns: MeanSd


class RequestStats(BaseModel):
    count: int
    per_member: MeanSd
    message_length_chars: MeanSd
    type_counts: dict[str, int]


class ClassIdeationStats(BaseModel):
    members: int
    generation: GenerationStats
    evaluation: EvaluationStats
    feedback: FeedbackStats
    requests: RequestStats


class IdeationCycleStats(BaseModel):
    users: ClassIdeationStats
    agents: ClassIdeationStats


class IdeationStats(BaseModel):
    sd_kind: str = SD_KIND
    cycles: list[IdeationCycleStats]


def ideation_stats(
    logs: Sequence[Sequence[SessionEvent]], configs: Sequence[TeamConfig]
) -> IdeationStats:
    """Action frequencies and detail statistics per actor class, one cycle per
    (log, config) pair. Feedback sessions are attributed to their initiator."""
    if len(logs) != len(configs):
        raise PairingError(f"{len(logs)} logs but {len(configs)} configs")
    for log in logs:
        _ensure_sealed(log)
    cycles = [
        IdeationCycleStats(
            users=_class_stats(log, config, MemberKind.HUMAN),
            agents=_class_stats(log, config, MemberKind.AGENT),
        )
        for log, config in zip(logs, configs)
    ]
    return IdeationStats(cycles=cycles)


def _class_stats(log, config: TeamConfig, kind: MemberKind) -> ClassIdeationStats:
    class_ids = {m.member_id for m in config.members if m.kind is kind}

    def holders(role: RoleKind) -> list[str]:
        return [m.member_id for m in config.members if m.kind is kind and m.has_role(role)]

    idea_counts = {m: 0 for m in class_ids}
    idea_lengths: list[int] = []
    eval_counts = {m: 0 for m in class_ids}
    comment_lengths: list[int] = []
    novelty: list[int] = []
    completeness: list[int] = []
    quality: list[int] = []
    session_counts = {m: 0 for m in class_ids}
    message_lengths: list[int] = []
    turns_per_session: list[int] = []
    request_counts = {m: 0 for m in class_ids}
    request_lengths: list[int] = []
    type_counts = {r.value: 0 for r in (RoleKind.IDEA_GENERATION, RoleKind.IDEA_EVALUATION, RoleKind.FEEDBACK)}

    thread_initiator: dict[str, str] = {}
    thread_turns: dict[str, int] = {}

    for event in log:
        if isinstance(event, (ev.IdeaGenerated, ev.IdeaUpdated)):
            if event.idea.author in class_ids:
                idea_counts[event.idea.author] += 1
                idea_lengths.append(event.idea.text_length())
        elif isinstance(event, ev.IdeaEvaluated):
            e = event.evaluation
            if e.evaluator in class_ids:
                eval_counts[e.evaluator] += 1
                if e.comment is not None:
                    comment_lengths.append(len(e.comment))
                novelty.append(e.novelty)
                completeness.append(e.completeness)
                quality.append(e.quality)
        elif isinstance(event, ev.FeedbackOpened):
            thread_initiator[event.session_ref] = event.initiator
            thread_turns[event.session_ref] = 0
        elif isinstance(event, ev.FeedbackMessage):
            thread_turns[event.session_ref] += 1
            if event.author in class_ids:
                message_lengths.append(len(event.text))
        elif isinstance(event, ev.FeedbackClosed):
            initiator = thread_initiator[event.session_ref]
            if initiator in class_ids:
                session_counts[initiator] += 1
                turns_per_session.append(thread_turns[event.session_ref])
        elif isinstance(event, ev.RequestIssued):
            if event.from_member in class_ids:
                request_counts[event.from_member] += 1
                request_lengths.append(len(event.text))
                type_counts[event.action.value] += 1

    return ClassIdeationStats(
        members=len(class_ids),
        generation=GenerationStats(
            count=sum(idea_counts.values()),
            per_member=MeanSd.of([idea_counts[m] for m in holders(RoleKind.IDEA_GENERATION)]),
            text_length_chars=MeanSd.of(idea_lengths),
        ),
        evaluation=EvaluationStats(
            count=sum(eval_counts.values()),
            per_member=MeanSd.of([eval_counts[m] for m in holders(RoleKind.IDEA_EVALUATION)]),
            comment_length_chars=MeanSd.of(comment_lengths),
            rating_novelty_mean=_mean(novelty),
            rating_completeness_mean=_mean(completeness),
            rating_quality_mean=_mean(quality),
        ),
        feedback=FeedbackStats(
            session_count=sum(session_counts.values()),
            per_member=MeanSd.of([session_counts[m] for m in holders(RoleKind.FEEDBACK)]),
            message_length_chars=MeanSd.of(message_lengths),
            turns=MeanSd.of(turns_per_session),
        ),
        requests=RequestStats(
            count=sum(request_counts.values()),
            per_member=MeanSd.of([request_counts[m] for m in holders(RoleKind.REQUEST)]),
            message_length_chars=MeanSd.of(request_lengths),
            type_counts=type_counts,
        ),
    )
