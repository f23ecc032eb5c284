// Reflection dashboard: five panels fed by the API payloads. Every displayed
// number is the payload value verbatim; nothing is recomputed client-side.

import { clear, el } from "./dom";
import { renderTeamGraph } from "./graph";
import type { ReflectionPayload, TeamConfig, TimelineEntry } from "./types";
import { ROLE_LABELS } from "./types";

export interface ReflectionCallbacks {
  onReform: () => void;
  onTimelineFilter?: (member: string | null) => void;
}

export class ReflectionView {
  private container: HTMLElement | null = null;
  private flowMode: "feedback" | "request" = "feedback";
  private memberFilter: string | null = null;

  constructor(
    private config: TeamConfig,
    private payload: ReflectionPayload,
    private timelineEntries: TimelineEntry[],
    private callbacks: ReflectionCallbacks,
  ) {}

  mount(container: HTMLElement): void {
    this.container = container;
    this.render();
  }

  setTimeline(entries: TimelineEntry[]): void {
    this.timelineEntries = entries;
    this.render();
  }

  render(): void {
    const container = this.container;
    if (!container) return;
    clear(container);
    container.append(
      el(
        "div",
        { class: "session-header" },
        el("h2", {}, "Team reflection"),
        el(
          "button",
          { class: "primary", id: "reform-team-btn", onclick: () => this.callbacks.onReform() },
          "Reform Team",
        ),
      ),
      this.renderSummaryPanel(),
      el(
        "div",
        { class: "reflection-columns" },
        this.renderMembersPanel(),
        this.renderFlowPanel(),
        this.renderTimelinePanel(),
        this.renderIdeasPanel(),
      ),
    );
  }

  private renderSummaryPanel(): HTMLElement {
    const summary = this.payload.summary;
    const stat = (label: string, value: number, key: string) =>
      el(
        "div",
        { class: "stat" },
        el("div", { class: "stat-value", "data-stat": key }, String(value)),
        el("div", { class: "stat-label" }, label),
      );
    return el(
      "section",
      { class: "panel summary-panel", id: "summary-panel" },
      el("h3", {}, `${this.config.team_name} — ${this.config.topic || "ideation"}`),
      el(
        "div",
        { class: "stats-row" },
        stat("participants", summary.participants, "participants"),
        stat("total ideas", summary.total_ideas, "total_ideas"),
        stat("evaluations", summary.evaluations, "evaluations"),
        stat("feedback sessions", summary.feedback_sessions, "feedback_sessions"),
        stat("requests", summary.requests, "requests"),
      ),
    );
  }

  private renderMembersPanel(): HTMLElement {
    const list = el("div", { class: "member-cards", id: "members-panel" });
    for (const member of this.config.members) {
      const row = this.payload.member_activity[member.member_id];
      if (!row) continue;
      const persona = member.persona;
      const personaBits = [
        persona.social.age ? `${persona.social.age}` : null,
        persona.social.occupation ?? null,
        persona.personal.skills ?? null,
      ].filter((bit) => bit !== null);
      list.append(
        el(
          "article",
          { class: "member-card", "data-member": member.member_id },
          el("h4", {}, `${persona.name} (${member.kind})`),
          personaBits.length > 0 ? el("p", { class: "persona-line" }, personaBits.join(" · ")) : null,
          el(
            "ul",
            { class: "activity-counts" },
            el("li", { "data-count": "idea_generation" }, `${ROLE_LABELS.idea_generation}: ${row.idea_generation}`),
            el("li", { "data-count": "idea_evaluation" }, `${ROLE_LABELS.idea_evaluation}: ${row.idea_evaluation}`),
            el("li", { "data-count": "feedback_sessions" }, `${ROLE_LABELS.feedback}: ${row.feedback_sessions}`),
            el("li", { "data-count": "requests" }, `${ROLE_LABELS.request}: ${row.requests}`),
          ),
        ),
      );
    }
    return el("section", { class: "panel" }, el("h3", {}, "Members"), list);
  }

  private renderFlowPanel(): HTMLElement {
    const matrix = this.flowMode === "feedback" ? this.payload.flows.feedback : this.payload.flows.request;
    const labels = new Map<string, string>();
    for (const cell of matrix.cells) {
      labels.set(`${cell.from}->${cell.to}`, String(cell.count));
      labels.set(`${cell.to}->${cell.from}`, labels.get(`${cell.to}->${cell.from}`) ?? "");
    }
    const toggle = el(
      "div",
      { class: "flow-toggle" },
      el(
        "button",
        {
          id: "flow-feedback-btn",
          class: this.flowMode === "feedback" ? "active" : "",
          onclick: () => {
            this.flowMode = "feedback";
            this.render();
          },
        },
        "Feedback",
      ),
      el(
        "button",
        {
          id: "flow-request-btn",
          class: this.flowMode === "request" ? "active" : "",
          onclick: () => {
            this.flowMode = "request";
            this.render();
          },
        },
        "Request",
      ),
    );
    const cellList = el("ul", { class: "flow-cells", id: "flow-cells" });
    for (const cell of matrix.cells) {
      cellList.append(
        el(
          "li",
          { "data-flow": `${cell.from}->${cell.to}` },
          `${cell.from} → ${cell.to}: ${cell.count}`,
        ),
      );
    }
    return el(
      "section",
      { class: "panel", id: "flow-panel" },
      el("h3", {}, "Team relationships"),
      toggle,
      renderTeamGraph(this.config, {}, { edgeLabels: labels }),
      cellList,
    );
  }

  private renderTimelinePanel(): HTMLElement {
    const filter = el("select", { id: "timeline-filter" }) as HTMLSelectElement;
    filter.append(el("option", { value: "" }, "All members"));
    for (const member of this.config.members) {
      filter.append(el("option", { value: member.member_id }, member.persona.name));
    }
    filter.value = this.memberFilter ?? "";
    filter.addEventListener("change", () => {
      this.memberFilter = filter.value || null;
      this.callbacks.onTimelineFilter?.(this.memberFilter);
    });
    const list = el("ol", { class: "timeline", id: "timeline-panel" });
    for (const entry of this.timelineEntries) {
      list.append(
        el(
          "li",
          { "data-seq": String(entry.seq) },
          el("span", { class: "timeline-at" }, `t=${entry.at}`),
          ` ${entry.description}`,
        ),
      );
    }
    return el("section", { class: "panel" }, el("h3", {}, "Action timeline"), filter, list);
  }

  private renderIdeasPanel(): HTMLElement {
    const list = el("ol", { class: "ranked-ideas", id: "ranked-ideas" });
    for (const ranked of this.payload.ranked_ideas) {
      list.append(
        el(
          "li",
          { "data-idea": ranked.idea.idea_id },
          el("strong", {}, ranked.idea.title || ranked.idea.idea_id),
          ` by ${ranked.author} — `,
          el(
            "span",
            { "data-rating": ranked.idea.idea_id },
            ranked.mean_rating === null ? "unrated" : `${ranked.mean_rating} rating`,
          ),
          el(
            "span",
            { "data-eval-count": ranked.idea.idea_id },
            ` (${ranked.evaluation_count} evaluations)`,
          ),
        ),
      );
    }
    return el("section", { class: "panel" }, el("h3", {}, "Generated ideas"), list);
  }
}
