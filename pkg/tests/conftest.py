"""Shared fixtures: config builders, fuzz generators, and a scripted backend."""

from __future__ import annotations

import random

import pytest

from ideateam.engine import Session, start_session
from ideateam.policies import HumanPolicy, run_simulation
from ideateam.providers import CompletionRequest, MockProvider
from ideateam.team import (
    EdgeKind,
    MemberKind,
    MemberSpec,
    Persona,
    PersonalIdentity,
    RoleKind,
    SharedMentalModel,
    SocialIdentity,
    StructureEdge,
    TeamConfig,
)

ALL_ROLES = list(RoleKind)


def make_member(member_id: str, kind: MemberKind, roles, name: str | None = None, **persona_fields) -> MemberSpec:
    persona = Persona(name=name or member_id.title(), **persona_fields)
    return MemberSpec(member_id=member_id, kind=kind, persona=persona, roles=list(roles))


def star_config(agent_count: int = 3, topic: str = "future education systems") -> TeamConfig:
    """One human hub with peer spokes to every agent; first agent generates."""
    agents = []
    edges = []
    for index in range(agent_count):
        member_id = f"agent{index + 1}"
        roles = [ALL_ROLES[index % len(ALL_ROLES)], RoleKind.IDEA_GENERATION] if index == 0 else [
            ALL_ROLES[index % len(ALL_ROLES)]
        ]
        agents.append(make_member(member_id, MemberKind.AGENT, set(roles)))
        edges.append(StructureEdge(a="user", b=member_id, kind=EdgeKind.PEER))
    return TeamConfig(
        team_name="Star Lab",
        topic=topic,
        members=[
            make_member("user", MemberKind.HUMAN, [RoleKind.IDEA_EVALUATION, RoleKind.FEEDBACK, RoleKind.REQUEST]),
            *agents,
        ],
        edges=edges,
        smm=SharedMentalModel(task_model="Favor practical, affordable concepts."),
    )


def rich_config() -> TeamConfig:
    """Four members wired so every pipeline has something to do."""
    return TeamConfig(
        team_name="Rich Lab",
        topic="wearable wellbeing devices",
        members=[
            make_member(
                "user", MemberKind.HUMAN,
                [RoleKind.IDEA_GENERATION, RoleKind.IDEA_EVALUATION, RoleKind.FEEDBACK, RoleKind.REQUEST],
                social=SocialIdentity(occupation="design lead"),
            ),
            make_member(
                "ada", MemberKind.AGENT,
                [RoleKind.IDEA_GENERATION, RoleKind.FEEDBACK],
                personal=PersonalIdentity(skills="industrial design"),
            ),
            make_member("ben", MemberKind.AGENT, [RoleKind.IDEA_EVALUATION, RoleKind.REQUEST]),
            make_member("cyd", MemberKind.AGENT, [RoleKind.IDEA_GENERATION, RoleKind.IDEA_EVALUATION]),
        ],
        edges=[
            StructureEdge(a="user", b="ada", kind=EdgeKind.HIERARCHICAL),
            StructureEdge(a="user", b="ben", kind=EdgeKind.HIERARCHICAL),
            StructureEdge(a="ada", b="cyd", kind=EdgeKind.PEER),
            StructureEdge(a="ben", b="cyd", kind=EdgeKind.PEER),
            StructureEdge(a="ada", b="ben", kind=EdgeKind.PEER),
        ],
        smm=SharedMentalModel(
            task_model="Focus on IoT-based services",
            team_model="Challenge each other's assumptions early.",
        ),
    )


@pytest.fixture
def mock_provider() -> MockProvider:
    return MockProvider(seed=7)


class StubProvider:
    """Backend scripted with raw outputs; records traffic like the mock."""

    def __init__(self, outputs: list[str], max_retries: int = 2) -> None:
        self.outputs = list(outputs)
        self.max_retries = max_retries
        self.recorded: list[CompletionRequest] = []

    def complete(self, request: CompletionRequest) -> str:
        self.recorded.append(request)
        if not self.outputs:
            raise AssertionError("stub exhausted")
        return self.outputs.pop(0)


# --- fuzzing -------------------------------------------------------------------

FIRST_NAMES = ("Ada", "Ben", "Cyd", "Dee", "Eli", "Fay", "Gus", "Hal")


def random_valid_config(rng: random.Random, max_members: int = 6) -> TeamConfig:
    """A random config that passes validation; hierarchy edges stay acyclic by
    only pointing from lower to higher member index."""
    size = rng.randint(3, max_members)
    member_ids = [f"m{i}" for i in range(size)]
    human_index = rng.randrange(size)

    members = []
    for index, member_id in enumerate(member_ids):
        kind = MemberKind.HUMAN if index == human_index else MemberKind.AGENT
        roles = {role for role in ALL_ROLES if rng.random() < 0.5}
        if not roles:
            roles = {rng.choice(ALL_ROLES)}
        members.append(make_member(member_id, kind, roles, name=FIRST_NAMES[index]))
    if not any(m.has_role(RoleKind.IDEA_GENERATION) for m in members):
        generator = rng.choice(members)
        generator.roles.append(RoleKind.IDEA_GENERATION)
        generator.roles.sort(key=lambda r: ALL_ROLES.index(r))

    edges = []
    for a_index in range(size):
        for b_index in range(a_index + 1, size):
            if rng.random() < 0.5:
                kind = EdgeKind.HIERARCHICAL if rng.random() < 0.4 else EdgeKind.PEER
                edges.append(StructureEdge(a=member_ids[a_index], b=member_ids[b_index], kind=kind))

    # Support-only members must not be edge-isolated.
    support_only = {RoleKind.FEEDBACK, RoleKind.REQUEST}
    for index, member in enumerate(members):
        if set(member.roles) <= support_only:
            if not any(member.member_id in (e.a, e.b) for e in edges):
                other = member_ids[(index + 1) % size]
                edges.append(StructureEdge(a=member.member_id, b=other, kind=EdgeKind.PEER))

    smm_texts = ("Focus on IoT-based services", "Keep concepts buildable in a quarter", "")
    return TeamConfig(
        team_name=f"Fuzz Team {rng.randrange(1000)}",
        topic=rng.choice(("future education", "urban mobility", "healthy ageing")),
        members=members,
        edges=edges,
        smm=SharedMentalModel(task_model=rng.choice(smm_texts), team_model=rng.choice(smm_texts)),
    )


def random_policy(rng: random.Random, config: TeamConfig) -> HumanPolicy:
    """Scripted human behavior mixing requests, evaluations, feedback, and noise.

    Some actions will be rejected by the engine on purpose; rejections must
    never corrupt a session."""
    script = []
    now = 0.0
    agent_ids = [m.member_id for m in config.agents()]
    for _ in range(rng.randrange(4)):
        now += rng.randint(1, 15)
        choice = rng.random()
        if choice < 0.4:
            script.append(
                {
                    "at": now,
                    "action": {
                        "kind": "request",
                        "recipient": rng.choice(agent_ids),
                        "action": rng.choice(["idea_generation", "idea_evaluation", "feedback"]),
                        "text": "Scripted nudge.",
                    },
                }
            )
        elif choice < 0.7:
            script.append(
                {
                    "at": now,
                    "action": {
                        "kind": "open_feedback",
                        "recipient": rng.choice(agent_ids),
                        "message": "Scripted check-in on the latest ideas.",
                    },
                }
            )
        else:
            script.append(
                {
                    "at": now,
                    "action": {
                        "kind": "generate_idea",
                        "title": "Operator idea",
                        "object": "A concept from the operator",
                        "function": "Keeps the team anchored",
                        "behavior": "Sets direction when agents drift",
                        "structure": "One pager",
                    },
                }
            )
    reactive = []
    if rng.random() < 0.6:
        reactive.append(
            {
                "on": {"type": "idea_generated", "idea.author": "$not_human"},
                "respond": {
                    "kind": "evaluate_idea",
                    "idea_id": "$event.idea.idea_id",
                    "novelty": rng.randint(1, 7),
                    "completeness": rng.randint(1, 7),
                    "quality": rng.randint(1, 7),
                    "comment": "Fuzz evaluation.",
                },
                "limit": rng.randint(1, 8),
            }
        )
    return HumanPolicy.model_validate({"name": "fuzz", "script": script, "reactive": reactive})


def run_fuzz_session(seed: int, duration: float = 45.0, after_step=None) -> tuple[Session, list]:
    """One deterministic fuzzed session: random valid team, random policy, mock.

    Tracks the largest recent-action ring seen at any step on
    ``session.max_stm_observed`` (memory bounds are not visible in the log).
    """
    rng = random.Random(seed)
    config = random_valid_config(rng)
    policy = random_policy(rng, config)
    session = start_session(config, MockProvider(seed=seed), seed=seed, time_scale=0.0)
    observed = {"max_stm": 0}

    def probe(live_session):
        for agent in live_session.agents.values():
            observed["max_stm"] = max(observed["max_stm"], len(agent.stm.recent_actions))
        if after_step is not None:
            after_step(live_session)

    log = run_simulation(session, policy, duration, after_step=probe)
    session.max_stm_observed = observed["max_stm"]
    return session, log


@pytest.fixture(scope="session")
def fuzzed_sessions() -> list[tuple[Session, list]]:
    """Fifty deterministic fuzzed sessions shared across invariant suites."""
    return [run_fuzz_session(seed) for seed in range(50)]
