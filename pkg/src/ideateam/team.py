"""Team formation model: members, personas, structure graph, shared guidelines.

A team configuration covers five dimensions: size, structure (a graph of
hierarchical/peer edges), role allocation, member personas, and a shared
mental model injected into every agent's standing prompt. Validation returns
violations as data; structural queries answer adjacency and hierarchy-depth
questions.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ._canon import canonical_dumps, digest


class RoleKind(str, Enum):
    """The four role-permitted action kinds. No others exist anywhere."""

    IDEA_GENERATION = "idea_generation"
    IDEA_EVALUATION = "idea_evaluation"
    FEEDBACK = "feedback"
    REQUEST = "request"


# Canonical ordering used for deterministic iteration and serialization.
ROLE_ORDER = (
    RoleKind.IDEA_GENERATION,
    RoleKind.IDEA_EVALUATION,
    RoleKind.FEEDBACK,
    RoleKind.REQUEST,
)

# Request itself is not requestable.
REQUESTABLE_ROLES = (
    RoleKind.IDEA_GENERATION,
    RoleKind.IDEA_EVALUATION,
    RoleKind.FEEDBACK,
)

MIN_TEAM_SIZE = 3
MAX_TEAM_SIZE = 6


class MemberKind(str, Enum):
    HUMAN = "human"
    AGENT = "agent"


class EdgeKind(str, Enum):
    """Hierarchical edges are directed (a is superior of b); peer edges are not."""

    HIERARCHICAL = "hierarchical"
    PEER = "peer"


class StructureClass(str, Enum):
    FLAT = "flat"
    SINGLE_TIER = "single_tier"
    MULTI_TIER = "multi_tier"


class UnknownMemberError(KeyError):
    """A member id does not belong to the team."""


class CyclicHierarchyError(ValueError):
    """Hierarchical edges form a directed cycle."""


class SocialIdentity(BaseModel):
    model_config = ConfigDict(extra="forbid")

    age: Optional[int] = Field(default=None, ge=1)
    gender: Optional[str] = None
    education: Optional[str] = None
    occupation: Optional[str] = None


class PersonalIdentity(BaseModel):
    model_config = ConfigDict(extra="forbid")

    personality: Optional[str] = None
    skills: Optional[str] = None


class LifeContext(BaseModel):
    model_config = ConfigDict(extra="forbid")

    work_style: Optional[str] = None
    likes: Optional[str] = None
    dislikes: Optional[str] = None


class Persona(BaseModel):
    """Resume-like member profile; every attribute except the name is optional."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    social: SocialIdentity = Field(default_factory=SocialIdentity)
    personal: PersonalIdentity = Field(default_factory=PersonalIdentity)
    life_context: LifeContext = Field(default_factory=LifeContext)


class MemberSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    member_id: str = Field(min_length=1)
    kind: MemberKind
    persona: Persona
    roles: list[RoleKind] = Field(default_factory=list)

    @field_validator("roles")
    @classmethod
    def _canonical_roles(cls, v: list[RoleKind]) -> list[RoleKind]:
        # Dedupe and order canonically so serialization is stable.
        present = set(v)
        return [r for r in ROLE_ORDER if r in present]

    def has_role(self, role: RoleKind) -> bool:
        return role in self.roles


class StructureEdge(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: str
    b: str
    kind: EdgeKind


class SharedMentalModel(BaseModel):
    """Free-text task/team guidelines; recorded unmodified (both may be empty)."""

    model_config = ConfigDict(extra="forbid")

    task_model: str = ""
    team_model: str = ""

    def combined_length(self) -> int:
        return len(self.task_model) + len(self.team_model)


class TeamConfig(BaseModel):
    """A candidate team. Parse-level checks are structural only; business rules
    live in :func:`validate_team` so invalid candidates stay representable."""

    model_config = ConfigDict(extra="forbid")

    team_name: str = ""
    topic: str = ""
    members: list[MemberSpec] = Field(default_factory=list)
    edges: list[StructureEdge] = Field(default_factory=list)
    smm: SharedMentalModel = Field(default_factory=SharedMentalModel)

    def member_ids(self) -> list[str]:
        return [m.member_id for m in self.members]

    def member(self, member_id: str) -> MemberSpec:
        for m in self.members:
            if m.member_id == member_id:
                return m
        raise UnknownMemberError(member_id)

    def humans(self) -> list[MemberSpec]:
        return [m for m in self.members if m.kind is MemberKind.HUMAN]

    def agents(self) -> list[MemberSpec]:
        return [m for m in self.members if m.kind is MemberKind.AGENT]

    def human_id(self) -> str:
        return self.humans()[0].member_id

    def neighbors(self, member_id: str) -> list[str]:
        """Members joined to ``member_id`` by any edge, in member order."""
        self.member(member_id)
        joined = set()
        for e in self.edges:
            if e.a == member_id:
                joined.add(e.b)
            elif e.b == member_id:
                joined.add(e.a)
        return [m for m in self.member_ids() if m in joined]

    def edge_between(self, a: str, b: str) -> Optional[StructureEdge]:
        for e in self.edges:
            if {e.a, e.b} == {a, b}:
                return e
        return None

    def canonical_json(self) -> str:
        return canonical_dumps(self)

    def digest(self) -> str:
        return digest(self)


class Violation(BaseModel):
    rule: str
    subject: Optional[str] = None
    detail: str = ""


class ValidationReport(BaseModel):
    ok: bool
    violations: list[Violation] = Field(default_factory=list)


# Rule identifiers form a closed, published set (mirrored by the API).
TEAM_TOO_SMALL = "TeamTooSmall"
TEAM_TOO_LARGE = "TeamTooLarge"
NO_HUMAN = "NoHuman"
MULTIPLE_HUMANS = "MultipleHumans"
NO_GENERATOR = "NoGenerator"
EMPTY_ROLES = "EmptyRoles"
DUPLICATE_MEMBER_ID = "DuplicateMemberId"
UNKNOWN_EDGE_MEMBER = "UnknownEdgeMember"
SELF_EDGE = "SelfEdge"
DUPLICATE_EDGE = "DuplicateEdge"
ISOLATED_MEMBER = "IsolatedMember"


def validate_team(config: TeamConfig) -> ValidationReport:
    """Check every formation rule; violations are data, not failures.

    A config that passes here can be assumed valid by every downstream module.
    """
    found: list[Violation] = []

    n = len(config.members)
    if n < MIN_TEAM_SIZE:
        found.append(Violation(rule=TEAM_TOO_SMALL, detail=f"{n} members, minimum is {MIN_TEAM_SIZE}"))
    if n > MAX_TEAM_SIZE:
        found.append(Violation(rule=TEAM_TOO_LARGE, detail=f"{n} members, maximum is {MAX_TEAM_SIZE}"))

    seen_ids: set[str] = set()
    for m in config.members:
        if m.member_id in seen_ids:
            found.append(Violation(rule=DUPLICATE_MEMBER_ID, subject=m.member_id))
        seen_ids.add(m.member_id)
        if not m.roles:
            found.append(Violation(rule=EMPTY_ROLES, subject=m.member_id, detail="every member needs at least one role"))

    humans = config.humans()
    if not humans:
        found.append(Violation(rule=NO_HUMAN, detail="exactly one human member required"))
    elif len(humans) > 1:
        found.append(Violation(rule=MULTIPLE_HUMANS, detail=f"{len(humans)} human members, expected 1"))

    if not any(m.has_role(RoleKind.IDEA_GENERATION) for m in config.members):
        found.append(Violation(rule=NO_GENERATOR, detail="no member holds the idea generation role"))

    ids = set(config.member_ids())
    seen_pairs: set[frozenset[str]] = set()
    for e in config.edges:
        for endpoint in (e.a, e.b):
            if endpoint not in ids:
                found.append(Violation(rule=UNKNOWN_EDGE_MEMBER, subject=endpoint))
        if e.a == e.b:
            found.append(Violation(rule=SELF_EDGE, subject=e.a))
            continue
        pair = frozenset((e.a, e.b))
        if pair in seen_pairs:
            found.append(Violation(rule=DUPLICATE_EDGE, subject=f"{e.a}~{e.b}"))
        seen_pairs.add(pair)

    # A member whose every role needs an adjacent counterpart can never act
    # if it has no edges; fail fast on such dead configurations.
    adjacency_only = {RoleKind.FEEDBACK, RoleKind.REQUEST}
    for m in config.members:
        if m.roles and set(m.roles) <= adjacency_only and m.member_id in ids:
            if not any(m.member_id in (e.a, e.b) for e in config.edges if e.a != e.b):
                found.append(
                    Violation(
                        rule=ISOLATED_MEMBER,
                        subject=m.member_id,
                        detail="holds only adjacency-requiring roles but has no edges",
                    )
                )

    return ValidationReport(ok=not found, violations=found)


def can_interact(config: TeamConfig, a: str, b: str) -> bool:
    """True iff an edge of either kind joins ``a`` and ``b``. Symmetric; no self-edges."""
    config.member(a)
    config.member(b)
    if a == b:
        return False
    return config.edge_between(a, b) is not None


def classify_structure(config: TeamConfig) -> StructureClass:
    """Classify by the longest directed superior chain over hierarchical edges.

    No hierarchical edges -> flat; longest chain of 1 edge -> single tier;
    2 or more -> multi tier.
    """
    children: dict[str, list[str]] = {}
    for e in config.edges:
        if e.kind is EdgeKind.HIERARCHICAL:
            children.setdefault(e.a, []).append(e.b)
    if not children:
        return StructureClass.FLAT

    depth_memo: dict[str, int] = {}
    on_path: set[str] = set()

    def longest_from(node: str) -> int:
        if node in on_path:
            raise CyclicHierarchyError(node)
        if node in depth_memo:
            return depth_memo[node]
        on_path.add(node)
        best = 0
        for child in children.get(node, ()):
            best = max(best, 1 + longest_from(child))
        on_path.discard(node)
        depth_memo[node] = best
        return best

    longest = max(longest_from(n) for n in list(children))
    return StructureClass.SINGLE_TIER if longest == 1 else StructureClass.MULTI_TIER


def roles_of(members: Iterable[MemberSpec], role: RoleKind) -> list[MemberSpec]:
    return [m for m in members if m.has_role(role)]
