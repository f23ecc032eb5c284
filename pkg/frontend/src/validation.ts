// Client-side mirror of the server's team validation. Rule identifiers match
// the server exactly; the server remains the authority (every client check has
// a matching 422 on forged submits).

import type { TeamConfig, RoleKind, Violation } from "./types";

export const MIN_TEAM_SIZE = 3;
export const MAX_TEAM_SIZE = 6;

const ADJACENCY_ONLY_ROLES: RoleKind[] = ["feedback", "request"];

export function validateTeam(config: TeamConfig): Violation[] {
  const violations: Violation[] = [];
  const n = config.members.length;
  if (n < MIN_TEAM_SIZE) {
    violations.push({ rule: "TeamTooSmall", detail: `${n} members, minimum is ${MIN_TEAM_SIZE}` });
  }
  if (n > MAX_TEAM_SIZE) {
    violations.push({ rule: "TeamTooLarge", detail: `${n} members, maximum is ${MAX_TEAM_SIZE}` });
  }

  const seen = new Set<string>();
  for (const member of config.members) {
    if (seen.has(member.member_id)) {
      violations.push({ rule: "DuplicateMemberId", subject: member.member_id });
    }
    seen.add(member.member_id);
    if (member.roles.length === 0) {
      violations.push({
        rule: "EmptyRoles",
        subject: member.member_id,
        detail: "every member needs at least one role",
      });
    }
  }

  const humans = config.members.filter((m) => m.kind === "human");
  if (humans.length === 0) {
    violations.push({ rule: "NoHuman", detail: "exactly one human member required" });
  } else if (humans.length > 1) {
    violations.push({ rule: "MultipleHumans", detail: `${humans.length} human members, expected 1` });
  }

  if (!config.members.some((m) => m.roles.includes("idea_generation"))) {
    violations.push({ rule: "NoGenerator", detail: "no member holds the idea generation role" });
  }

  const ids = new Set(config.members.map((m) => m.member_id));
  const pairs = new Set<string>();
  for (const edge of config.edges) {
    for (const endpoint of [edge.a, edge.b]) {
      if (!ids.has(endpoint)) {
        violations.push({ rule: "UnknownEdgeMember", subject: endpoint });
      }
    }
    if (edge.a === edge.b) {
      violations.push({ rule: "SelfEdge", subject: edge.a });
      continue;
    }
    const key = [edge.a, edge.b].sort().join("~");
    if (pairs.has(key)) {
      violations.push({ rule: "DuplicateEdge", subject: `${edge.a}~${edge.b}` });
    }
    pairs.add(key);
  }

  for (const member of config.members) {
    const supportOnly =
      member.roles.length > 0 && member.roles.every((r) => ADJACENCY_ONLY_ROLES.includes(r));
    if (!supportOnly) continue;
    const hasEdge = config.edges.some(
      (e) => e.a !== e.b && (e.a === member.member_id || e.b === member.member_id),
    );
    if (!hasEdge) {
      violations.push({
        rule: "IsolatedMember",
        subject: member.member_id,
        detail: "holds only adjacency-requiring roles but has no edges",
      });
    }
  }

  return violations;
}

export function isValid(config: TeamConfig): boolean {
  return validateTeam(config).length === 0;
}

export function neighborsOf(config: TeamConfig, memberId: string): string[] {
  const joined = new Set<string>();
  for (const edge of config.edges) {
    if (edge.a === memberId) joined.add(edge.b);
    else if (edge.b === memberId) joined.add(edge.a);
  }
  return config.members.map((m) => m.member_id).filter((id) => joined.has(id));
}

export function humanOf(config: TeamConfig): string {
  const human = config.members.find((m) => m.kind === "human");
  return human ? human.member_id : "";
}
