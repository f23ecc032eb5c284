"""Regenerates the fixtures shared with the browser client's test suite.

Run from the repo root:  python3 tests/gen_frontend_fixtures.py

The invalid/valid draft files drive both halves of the wizard-mirror check
(client: Create Team disabled; server: POST rejected 422), and the reflection
fixture freezes the API payload the dashboard must render verbatim.
test_secondary_contract.py fails if these files drift from the code.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from ideateam._canon import to_jsonable
from ideateam.reflection import flow, member_activity, rank_ideas, summarize, timeline
from ideateam.team import (
    EdgeKind,
    MemberKind,
    RoleKind,
    StructureEdge,
    TeamConfig,
    validate_team,
)

from conftest import make_member, star_config
from synthetic import fixed_counts_log

FIXTURE_DIR = Path(__file__).parent.parent / "frontend" / "tests" / "fixtures"


def invalid_drafts() -> list[TeamConfig]:
    drafts: list[TeamConfig] = []

    for agents in (0, 1):  # sizes 1 and 2
        drafts.append(star_config(agent_count=agents) if agents else _solo_human())
    for agents in (6, 7):  # sizes 7 and 8
        drafts.append(star_config(agent_count=agents))

    no_human = star_config()
    no_human.members[0].kind = MemberKind.AGENT
    drafts.append(no_human)

    two_humans = star_config()
    two_humans.members[1].kind = MemberKind.HUMAN
    drafts.append(two_humans)

    no_generator = star_config()
    for member in no_generator.members:
        member.roles[:] = [r for r in member.roles if r is not RoleKind.IDEA_GENERATION] or [
            RoleKind.IDEA_EVALUATION
        ]
    drafts.append(no_generator)

    empty_roles = star_config()
    empty_roles.members[2].roles[:] = []
    drafts.append(empty_roles)

    duplicate_ids = star_config()
    duplicate_ids.members[2].member_id = duplicate_ids.members[1].member_id
    drafts.append(duplicate_ids)

    ghost_edge = star_config()
    ghost_edge.edges.append(StructureEdge(a="user", b="ghost", kind=EdgeKind.PEER))
    drafts.append(ghost_edge)

    self_edge = star_config()
    self_edge.edges.append(StructureEdge(a="agent1", b="agent1", kind=EdgeKind.PEER))
    drafts.append(self_edge)

    duplicate_edge = star_config()
    duplicate_edge.edges.append(StructureEdge(a="agent1", b="user", kind=EdgeKind.HIERARCHICAL))
    drafts.append(duplicate_edge)

    isolated = star_config()
    isolated.members[3].roles[:] = [RoleKind.FEEDBACK, RoleKind.REQUEST]
    isolated.edges[:] = [e for e in isolated.edges if "agent3" not in (e.a, e.b)]
    drafts.append(isolated)

    # combinations
    small_and_no_generator = _solo_human()
    small_and_no_generator.members[0].roles[:] = [RoleKind.FEEDBACK]
    small_and_no_generator.edges[:] = []
    drafts.append(small_and_no_generator)

    large_no_human = star_config(agent_count=7)
    large_no_human.members[0].kind = MemberKind.AGENT
    drafts.append(large_no_human)

    empty_and_duplicate = star_config()
    empty_and_duplicate.members[1].roles[:] = []
    empty_and_duplicate.edges.append(StructureEdge(a="user", b="agent2", kind=EdgeKind.PEER))
    drafts.append(empty_and_duplicate)

    ghost_and_self = star_config()
    ghost_and_self.edges.append(StructureEdge(a="nobody", b="nobody", kind=EdgeKind.PEER))
    drafts.append(ghost_and_self)

    all_support_roles = star_config()
    for member in all_support_roles.members:
        member.roles[:] = [RoleKind.FEEDBACK, RoleKind.REQUEST]
    drafts.append(all_support_roles)

    isolated_pair = star_config(agent_count=3)
    isolated_pair.members[2].roles[:] = [RoleKind.REQUEST]
    isolated_pair.members[3].roles[:] = [RoleKind.FEEDBACK]
    isolated_pair.edges[:] = [e for e in isolated_pair.edges if e.b == "agent1"]
    drafts.append(isolated_pair)

    triple_human = star_config(agent_count=4)
    triple_human.members[1].kind = MemberKind.HUMAN
    triple_human.members[2].kind = MemberKind.HUMAN
    drafts.append(triple_human)

    assert len(drafts) == 20, f"expected 20 invalid drafts, built {len(drafts)}"
    return drafts


def _solo_human() -> TeamConfig:
    return TeamConfig(
        team_name="Solo",
        topic="t",
        members=[make_member("user", MemberKind.HUMAN, [RoleKind.IDEA_GENERATION])],
        edges=[],
    )


def valid_drafts() -> list[TeamConfig]:
    drafts = [star_config(agent_count=n) for n in (2, 3, 4, 5)]
    chain = star_config()
    chain.edges[:] = [
        StructureEdge(a="user", b="agent1", kind=EdgeKind.HIERARCHICAL),
        StructureEdge(a="agent1", b="agent2", kind=EdgeKind.HIERARCHICAL),
        StructureEdge(a="agent2", b="agent3", kind=EdgeKind.PEER),
    ]
    drafts.append(chain)
    return drafts


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)

    invalid_payload = []
    for config in invalid_drafts():
        report = validate_team(config)
        assert not report.ok, "invalid fixture draft unexpectedly passed validation"
        invalid_payload.append(
            {
                "draft": config.model_dump(mode="json"),
                "expected_rules": sorted({v.rule for v in report.violations}),
            }
        )
    (FIXTURE_DIR / "invalid_drafts.json").write_text(
        json.dumps(invalid_payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    valid_payload = []
    for config in valid_drafts():
        assert validate_team(config).ok
        valid_payload.append(config.model_dump(mode="json"))
    (FIXTURE_DIR / "valid_drafts.json").write_text(
        json.dumps(valid_payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    log = fixed_counts_log()
    reflection_fixture = {
        "config": log[0].config.model_dump(mode="json"),
        "reflection": {
            "summary": to_jsonable(summarize(log)),
            "member_activity": {m: to_jsonable(r) for m, r in member_activity(log).items()},
            "flows": {
                "feedback": to_jsonable(flow(log, RoleKind.FEEDBACK)),
                "request": to_jsonable(flow(log, RoleKind.REQUEST)),
            },
            "ranked_ideas": [to_jsonable(r) for r in rank_ideas(log)],
        },
        "timeline": [to_jsonable(t) for t in timeline(log)],
    }
    (FIXTURE_DIR / "reflection_payload.json").write_text(
        json.dumps(reflection_fixture, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(f"wrote fixtures to {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
