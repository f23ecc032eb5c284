"""Turns a persona plus the shared mental model into an agent's standing prompt.

The prompt narrates how traits show up in behavior instead of listing raw
attributes, embeds the shared guidelines verbatim, and states roles and
reachable teammates. Omitted persona attributes produce no text at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .team import EdgeKind, Persona, RoleKind, SharedMentalModel, TeamConfig


@dataclass(frozen=True)
class Neighbor:
    member_id: str
    name: str
    relation: str  # "your superior" | "your subordinate" | "a peer"
    roles: tuple[RoleKind, ...] = ()


@dataclass(frozen=True)
class TeamContext:
    team_name: str
    topic: str
    roles: tuple[RoleKind, ...]
    neighbors: tuple[Neighbor, ...] = field(default_factory=tuple)


def team_context_for(config: TeamConfig, member_id: str) -> TeamContext:
    """Collect the structural facts the profile prompt states for one member."""
    me = config.member(member_id)
    neighbors = []
    for other_id in config.neighbors(member_id):
        edge = config.edge_between(member_id, other_id)
        other = config.member(other_id)
        if edge.kind is EdgeKind.PEER:
            relation = "a peer"
        elif edge.a == other_id:
            relation = "your superior"
        else:
            relation = "your subordinate"
        neighbors.append(
            Neighbor(member_id=other_id, name=other.persona.name, relation=relation, roles=tuple(other.roles))
        )
    return TeamContext(
        team_name=config.team_name,
        topic=config.topic,
        roles=tuple(me.roles),
        neighbors=tuple(neighbors),
    )


def build_profile_prompt(persona: Persona, smm: SharedMentalModel, context: TeamContext) -> str:
    """Pure function of its inputs; fixed at session start and never mutated."""
    lines: list[str] = []
    lines.append(
        f'You are {persona.name}, a member of the team "{context.team_name}" '
        f"working on collaborative ideation about: {context.topic}."
    )

    social = persona.social
    if social.occupation:
        lines.append(
            f"You work as a {social.occupation}; approach every problem the way a seasoned "
            f"{social.occupation} would, drawing on that day-to-day practice."
        )
    if social.age is not None:
        lines.append(f"You bring the perspective and experience of a {social.age}-year-old.")
    if social.gender:
        lines.append(f"You identify as {social.gender}.")
    if social.education:
        lines.append(f"Your education in {social.education} shapes how you frame and dissect problems.")

    personal = persona.personal
    if personal.personality:
        lines.append(f"Your personality comes through in every exchange: {personal.personality}.")
    if personal.skills:
        lines.append(f"When you contribute, you lean on your skills in {personal.skills}.")

    life = persona.life_context
    if life.work_style:
        lines.append(f"Your working style: {life.work_style}.")
    if life.likes:
        lines.append(f"You gravitate toward {life.likes}.")
    if life.dislikes:
        lines.append(f"You steer away from {life.dislikes}.")

    if smm.task_model or smm.team_model:
        lines.append("Standing team guidelines (follow them in everything you do):")
        if smm.task_model:
            lines.append(smm.task_model)
        if smm.team_model:
            lines.append(smm.team_model)

    role_names = ", ".join(r.value for r in context.roles)
    lines.append(f"Your assigned roles on this team: {role_names}. Act only within them.")

    if context.neighbors:
        reachable = ", ".join(f"{n.name} [{n.member_id}] ({n.relation})" for n in context.neighbors)
        lines.append(f"You can interact directly only with: {reachable}.")
    else:
        lines.append("You have no direct connections; contribute through the shared idea board.")

    lines.append("Stay in character, be concrete, and keep the team's ideation moving.")
    return "\n".join(lines)
