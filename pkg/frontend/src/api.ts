// Thin JSON client over the service routes.

import type { ReflectionPayload, SessionEvent, TeamConfig, TimelineEntry, Violation } from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details?: unknown,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "HttpError";
  let message = `HTTP ${response.status}`;
  let details: unknown;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
    details = body.details;
  } catch {
    // non-JSON error body
  }
  throw new ApiError(response.status, code, message, details);
}

export class Api {
  constructor(
    public baseUrl: string = "/api",
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  createTeam(config: TeamConfig): Promise<{ team_id: string }> {
    return this.request("POST", "/teams", config);
  }

  getTeam(teamId: string): Promise<TeamConfig> {
    return this.request("GET", `/teams/${teamId}`);
  }

  createSession(
    teamId: string,
    params: { seed?: number; time_scale?: number; autorun?: boolean } = {},
  ): Promise<{ session_id: string }> {
    const query = new URLSearchParams();
    if (params.seed !== undefined) query.set("seed", String(params.seed));
    if (params.time_scale !== undefined) query.set("time_scale", String(params.time_scale));
    if (params.autorun !== undefined) query.set("autorun", String(params.autorun));
    const suffix = query.toString() ? `?${query}` : "";
    return this.request("POST", `/teams/${teamId}/sessions${suffix}`);
  }

  submitAction(sessionId: string, action: Record<string, unknown>): Promise<{ events: SessionEvent[] }> {
    return this.request("POST", `/sessions/${sessionId}/actions`, action);
  }

  endSession(sessionId: string): Promise<{ sealed: boolean; events: number }> {
    return this.request("POST", `/sessions/${sessionId}/end`);
  }

  reflection(sessionId: string): Promise<ReflectionPayload> {
    return this.request("GET", `/sessions/${sessionId}/reflection`);
  }

  timeline(sessionId: string, member?: string): Promise<{ entries: TimelineEntry[] }> {
    const suffix = member ? `?member=${encodeURIComponent(member)}` : "";
    return this.request("GET", `/sessions/${sessionId}/timeline${suffix}`);
  }

  eventsUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/events`;
  }
}

export function violationsFromError(error: unknown): Violation[] {
  if (error instanceof ApiError && error.code === "ValidationFailed") {
    const details = error.details as { violations?: Violation[] } | undefined;
    return details?.violations ?? [];
  }
  return [];
}
