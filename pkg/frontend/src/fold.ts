// Folds the ordered event stream into the live view's state. Rendering derives
// everything from this fold, so displayed order always equals stream order.

import type { AgentPhase, Evaluation, Idea, RoleKind, SessionEvent, TeamConfig } from "./types";

export interface FeedbackThreadState {
  ref: string;
  initiator: string;
  recipient: string;
  turns: { author: string; text: string }[];
  open: boolean;
}

export interface ChatItem {
  seq: number;
  at: number;
  kind: "message" | "system";
  threadRef?: string;
  author?: string;
  text: string;
}

export interface SessionState {
  config: TeamConfig | null;
  sessionId: string;
  ideas: Idea[];
  evaluations: Evaluation[];
  threads: Map<string, FeedbackThreadState>;
  chat: ChatItem[];
  phases: Map<string, AgentPhase>;
  gateOpen: boolean;
  ended: boolean;
  lastSeq: number;
}

export function emptyState(): SessionState {
  return {
    config: null,
    sessionId: "",
    ideas: [],
    evaluations: [],
    threads: new Map(),
    chat: [],
    phases: new Map(),
    gateOpen: false,
    ended: false,
    lastSeq: -1,
  };
}

export function evaluationsOf(state: SessionState, ideaId: string): Evaluation[] {
  return state.evaluations.filter((e) => e.idea_id === ideaId);
}

export function memberBusyInFeedback(state: SessionState, memberId: string): boolean {
  for (const thread of state.threads.values()) {
    if (thread.open && (thread.initiator === memberId || thread.recipient === memberId)) return true;
  }
  return false;
}

/** Phase badge text: the four loop phases plus "in feedback". */
export function statusBadge(state: SessionState, memberId: string): string {
  if (memberBusyInFeedback(state, memberId)) return "in feedback";
  return state.phases.get(memberId) ?? "wait";
}

export function applyEvent(state: SessionState, event: SessionEvent): void {
  state.lastSeq = event.seq;
  switch (event.type) {
    case "session_started":
      state.config = event.config;
      state.sessionId = event.session_id;
      for (const member of event.config.members) {
        if (member.kind === "agent") state.phases.set(member.member_id, "plan");
      }
      break;
    case "idea_generated":
    case "idea_updated":
      state.ideas.push(event.idea);
      state.gateOpen = true;
      state.chat.push({
        seq: event.seq,
        at: event.at,
        kind: "system",
        text: `${event.idea.author} ${event.type === "idea_updated" ? "updated" : "created"} "${event.idea.title}"`,
      });
      break;
    case "idea_evaluated": {
      const e = event.evaluation;
      state.evaluations.push(e);
      state.chat.push({
        seq: event.seq,
        at: event.at,
        kind: "system",
        text: `${e.evaluator} evaluated ${e.idea_id} (${e.novelty}/${e.completeness}/${e.quality})`,
      });
      break;
    }
    case "feedback_opened":
      state.threads.set(event.session_ref, {
        ref: event.session_ref,
        initiator: event.initiator,
        recipient: event.recipient,
        turns: [],
        open: true,
      });
      break;
    case "feedback_message": {
      const thread = state.threads.get(event.session_ref);
      if (thread) thread.turns.push({ author: event.author, text: event.text });
      state.chat.push({
        seq: event.seq,
        at: event.at,
        kind: "message",
        threadRef: event.session_ref,
        author: event.author,
        text: event.text,
      });
      break;
    }
    case "feedback_closed": {
      const thread = state.threads.get(event.session_ref);
      if (thread) thread.open = false;
      if (thread) {
        state.chat.push({
          seq: event.seq,
          at: event.at,
          kind: "system",
          threadRef: event.session_ref,
          text: `${thread.initiator} and ${thread.recipient} completed a feedback session`,
        });
      }
      break;
    }
    case "request_issued":
      state.chat.push({
        seq: event.seq,
        at: event.at,
        kind: "system",
        text: `${event.from} asked ${event.to} for ${event.action.replace("_", " ")}: "${event.text}"`,
      });
      break;
    case "phase_changed":
      state.phases.set(event.member, event.phase);
      break;
    case "action_rejected":
      state.chat.push({
        seq: event.seq,
        at: event.at,
        kind: "system",
        text: `blocked: ${event.rule}${event.detail ? ` (${event.detail})` : ""}`,
      });
      break;
    case "session_ended":
      state.ended = true;
      break;
    default:
      break; // request_fulfilled / action_skipped need no view state
  }
}

/** Options the composer may offer the human, mirroring server permissions. */
export function composerOptions(state: SessionState): {
  canGenerate: boolean;
  canEvaluate: boolean;
  canFeedback: boolean;
  canRequest: boolean;
  recipients: string[];
  requestableBy: Map<string, RoleKind[]>;
} {
  const config = state.config;
  if (config === null) {
    return {
      canGenerate: false, canEvaluate: false, canFeedback: false, canRequest: false,
      recipients: [], requestableBy: new Map(),
    };
  }
  const human = config.members.find((m) => m.kind === "human");
  const roles = new Set(human?.roles ?? []);
  const humanId = human?.member_id ?? "";
  const joined = new Set<string>();
  for (const edge of config.edges) {
    if (edge.a === humanId) joined.add(edge.b);
    else if (edge.b === humanId) joined.add(edge.a);
  }
  const recipients = config.members
    .map((m) => m.member_id)
    .filter((id) => joined.has(id));
  const requestableBy = new Map<string, RoleKind[]>();
  for (const id of recipients) {
    const member = config.members.find((m) => m.member_id === id);
    if (!member) continue;
    const requestable = member.roles.filter((r) => r !== "request");
    if (requestable.length > 0) requestableBy.set(id, requestable);
  }
  return {
    canGenerate: roles.has("idea_generation"),
    canEvaluate: roles.has("idea_evaluation") && state.gateOpen,
    canFeedback: roles.has("feedback") && state.gateOpen,
    canRequest: roles.has("request") && state.gateOpen,
    recipients,
    requestableBy,
  };
}
