// Wire types mirrored from the API (snake_case field names as serialized).

export type RoleKind = "idea_generation" | "idea_evaluation" | "feedback" | "request";
export type MemberKind = "human" | "agent";
export type EdgeKind = "hierarchical" | "peer";
export type AgentPhase = "plan" | "act" | "reflect" | "wait";

export const ALL_ROLES: RoleKind[] = ["idea_generation", "idea_evaluation", "feedback", "request"];
export const REQUESTABLE_ROLES: RoleKind[] = ["idea_generation", "idea_evaluation", "feedback"];

export const ROLE_LABELS: Record<RoleKind, string> = {
  idea_generation: "Idea Generation",
  idea_evaluation: "Idea Evaluation",
  feedback: "Feedback",
  request: "Request",
};

export interface SocialIdentity {
  age?: number | null;
  gender?: string | null;
  education?: string | null;
  occupation?: string | null;
}

export interface PersonalIdentity {
  personality?: string | null;
  skills?: string | null;
}

export interface LifeContext {
  work_style?: string | null;
  likes?: string | null;
  dislikes?: string | null;
}

export interface Persona {
  name: string;
  social: SocialIdentity;
  personal: PersonalIdentity;
  life_context: LifeContext;
}

export interface MemberSpec {
  member_id: string;
  kind: MemberKind;
  persona: Persona;
  roles: RoleKind[];
}

export interface StructureEdge {
  a: string;
  b: string;
  kind: EdgeKind;
}

export interface SharedMentalModel {
  task_model: string;
  team_model: string;
}

export interface TeamConfig {
  team_name: string;
  topic: string;
  members: MemberSpec[];
  edges: StructureEdge[];
  smm: SharedMentalModel;
}

export interface Violation {
  rule: string;
  subject?: string | null;
  detail?: string;
}

// --- session events ------------------------------------------------------------

export interface Idea {
  idea_id: string;
  title: string;
  object: string;
  function: string;
  behavior: string;
  structure: string;
  author: string;
  parent_id: string | null;
  created_at: number;
}

export interface Evaluation {
  idea_id: string;
  evaluator: string;
  novelty: number;
  completeness: number;
  quality: number;
  comment: string | null;
  created_at: number;
}

interface EventBase {
  seq: number;
  at: number;
}

export type SessionEvent =
  | (EventBase & { type: "session_started"; session_id: string; seed: number; time_scale: number; config: TeamConfig })
  | (EventBase & { type: "idea_generated"; idea: Idea })
  | (EventBase & { type: "idea_updated"; idea: Idea })
  | (EventBase & { type: "idea_evaluated"; evaluation: Evaluation })
  | (EventBase & { type: "feedback_opened"; session_ref: string; initiator: string; recipient: string })
  | (EventBase & { type: "feedback_message"; session_ref: string; author: string; text: string })
  | (EventBase & { type: "feedback_closed"; session_ref: string; forced: boolean })
  | (EventBase & { type: "request_issued"; request_ref: string; from: string; to: string; action: RoleKind; text: string })
  | (EventBase & { type: "request_fulfilled"; request_ref: string })
  | (EventBase & { type: "phase_changed"; member: string; phase: AgentPhase })
  | (EventBase & { type: "action_skipped"; member: string; reason: string })
  | (EventBase & { type: "action_rejected"; actor: string; rule: string; detail: string })
  | (EventBase & { type: "session_ended" });

// --- reflection payloads ----------------------------------------------------------

export interface SessionSummary {
  participants: number;
  total_ideas: number;
  evaluations: number;
  feedback_sessions: number;
  requests: number;
}

export interface MemberActivityRow {
  idea_generation: number;
  idea_evaluation: number;
  feedback_sessions: number;
  requests: number;
}

export interface FlowCell {
  from: string;
  to: string;
  count: number;
}

export interface FlowMatrix {
  kind: string;
  cells: FlowCell[];
}

export interface RankedIdea {
  idea: Idea;
  author: string;
  mean_rating: number | null;
  evaluation_count: number;
}

export interface ReflectionPayload {
  summary: SessionSummary;
  member_activity: Record<string, MemberActivityRow>;
  flows: { feedback: FlowMatrix; request: FlowMatrix };
  ranked_ideas: RankedIdea[];
}

export interface TimelineEntry {
  seq: number;
  at: number;
  type: string;
  actors: string[];
  description: string;
}
