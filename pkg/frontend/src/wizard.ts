// Five-step team formation wizard. The draft lives here; every change re-runs
// the client-side validation mirror, and "Create Team" stays disabled until the
// draft would pass the server's checks (the server still re-validates).

import { clear, el } from "./dom";
import { renderTeamGraph } from "./graph";
import type { MemberSpec, StructureEdge, TeamConfig, Violation } from "./types";
import { ALL_ROLES, ROLE_LABELS } from "./types";
import { MAX_TEAM_SIZE, MIN_TEAM_SIZE, validateTeam } from "./validation";

const STEP_TITLES = [
  "Team size & basics",
  "Team structure",
  "Role allocation",
  "Member personas",
  "Shared mental model",
];

const AGENT_NAMES = ["Ada", "Ben", "Cyd", "Dee", "Eli"];

export function defaultDraft(size = 4): TeamConfig {
  const members: MemberSpec[] = [
    {
      member_id: "you",
      kind: "human",
      persona: { name: "You", social: {}, personal: {}, life_context: {} },
      roles: ["idea_evaluation", "feedback", "request"],
    },
  ];
  const edges: StructureEdge[] = [];
  for (let index = 0; index < size - 1; index++) {
    const id = `agent-${index + 1}`;
    members.push({
      member_id: id,
      kind: "agent",
      persona: { name: AGENT_NAMES[index] ?? id, social: {}, personal: {}, life_context: {} },
      roles: index === 0 ? ["idea_generation"] : ["idea_generation", "idea_evaluation"],
    });
    edges.push({ a: "you", b: id, kind: "peer" });
  }
  return {
    team_name: "My Team",
    topic: "",
    members,
    edges,
    smm: { task_model: "", team_model: "" },
  };
}

export interface WizardCallbacks {
  onCreate: (draft: TeamConfig) => void;
}

export class TeamWizard {
  draft: TeamConfig;
  step = 1;
  private selectedNode: string | null = null;
  private container: HTMLElement | null = null;

  constructor(
    private callbacks: WizardCallbacks,
    initial?: TeamConfig,
  ) {
    this.draft = initial ? (JSON.parse(JSON.stringify(initial)) as TeamConfig) : defaultDraft();
  }

  violations(): Violation[] {
    return validateTeam(this.draft);
  }

  isCreateEnabled(): boolean {
    return this.violations().length === 0;
  }

  mount(container: HTMLElement): void {
    this.container = container;
    this.render();
  }

  private rerender(): void {
    if (this.container) this.render();
  }

  private resize(size: number): void {
    const agents = this.draft.members.filter((m) => m.kind === "agent");
    const target = size - this.draft.members.filter((m) => m.kind === "human").length;
    while (agents.length > target && agents.length > 0) {
      const removed = agents.pop()!;
      this.draft.members = this.draft.members.filter((m) => m.member_id !== removed.member_id);
      this.draft.edges = this.draft.edges.filter(
        (e) => e.a !== removed.member_id && e.b !== removed.member_id,
      );
    }
    let counter = agents.length;
    while (agents.length < target) {
      counter += 1;
      let id = `agent-${counter}`;
      while (this.draft.members.some((m) => m.member_id === id)) {
        counter += 1;
        id = `agent-${counter}`;
      }
      const member: MemberSpec = {
        member_id: id,
        kind: "agent",
        persona: { name: AGENT_NAMES[counter - 1] ?? id, social: {}, personal: {}, life_context: {} },
        roles: ["idea_generation"],
      };
      this.draft.members.push(member);
      agents.push(member);
      const humanId = this.draft.members.find((m) => m.kind === "human")?.member_id;
      if (humanId) this.draft.edges.push({ a: humanId, b: id, kind: "peer" });
    }
    this.rerender();
  }

  private handleNodeClick(memberId: string): void {
    if (this.selectedNode === null) {
      this.selectedNode = memberId;
    } else if (this.selectedNode === memberId) {
      this.selectedNode = null;
    } else {
      const a = this.selectedNode;
      const b = memberId;
      const existing = this.draft.edges.find(
        (e) => (e.a === a && e.b === b) || (e.a === b && e.b === a),
      );
      if (existing) {
        this.draft.edges = this.draft.edges.filter((e) => e !== existing);
      } else {
        this.draft.edges.push({ a, b, kind: "peer" });
      }
      this.selectedNode = null;
    }
    this.rerender();
  }

  private handleEdgeClick(edge: StructureEdge): void {
    // Cycle: peer -> hierarchical (forward) -> hierarchical (reversed) -> peer,
    // with "forward" defined by member order so the cycle needs no extra state.
    const index = this.draft.edges.indexOf(edge);
    if (index < 0) return;
    const orderOf = (id: string) => this.draft.members.findIndex((m) => m.member_id === id);
    if (edge.kind === "peer") {
      const [first, second] =
        orderOf(edge.a) <= orderOf(edge.b) ? [edge.a, edge.b] : [edge.b, edge.a];
      this.draft.edges[index] = { a: first, b: second, kind: "hierarchical" };
    } else if (orderOf(edge.a) <= orderOf(edge.b)) {
      this.draft.edges[index] = { a: edge.b, b: edge.a, kind: "hierarchical" };
    } else {
      this.draft.edges[index] = { a: edge.b, b: edge.a, kind: "peer" };
    }
    this.rerender();
  }

  render(): void {
    const container = this.container;
    if (!container) return;
    clear(container);

    const steps = el("ol", { class: "wizard-steps" });
    STEP_TITLES.forEach((title, index) => {
      const stepNumber = index + 1;
      steps.append(
        el(
          "li",
          {
            class: `wizard-step${this.step === stepNumber ? " active" : ""}`,
            onclick: () => {
              this.step = stepNumber;
              this.rerender();
            },
          },
          `${stepNumber}. ${title}`,
        ),
      );
    });

    const body = el("div", { class: "wizard-body" });
    switch (this.step) {
      case 1:
        body.append(this.renderBasics());
        break;
      case 2:
        body.append(this.renderStructure());
        break;
      case 3:
        body.append(this.renderRoles());
        break;
      case 4:
        body.append(this.renderPersonas());
        break;
      default:
        body.append(this.renderSmm());
        break;
    }

    container.append(
      el("h2", {}, "Form your team"),
      steps,
      body,
      this.renderFooter(),
    );
  }

  private renderBasics(): HTMLElement {
    const size = this.draft.members.length;
    const slider = el("input", {
      type: "range",
      min: String(MIN_TEAM_SIZE),
      max: String(MAX_TEAM_SIZE),
      value: String(Math.min(Math.max(size, MIN_TEAM_SIZE), MAX_TEAM_SIZE)),
      id: "team-size",
      oninput: (event) => this.resize(Number((event.target as HTMLInputElement).value)),
    }) as HTMLInputElement;
    return el(
      "div",
      {},
      el(
        "label",
        {},
        "Team name ",
        el("input", {
          type: "text",
          value: this.draft.team_name,
          oninput: (event) => {
            this.draft.team_name = (event.target as HTMLInputElement).value;
          },
        }),
      ),
      el(
        "label",
        {},
        "Ideation topic ",
        el("input", {
          type: "text",
          value: this.draft.topic,
          oninput: (event) => {
            this.draft.topic = (event.target as HTMLInputElement).value;
          },
        }),
      ),
      el(
        "label",
        {},
        `Team size (you + ${size - 1} agents) `,
        slider,
        el("span", { class: "size-readout" }, String(size)),
      ),
    );
  }

  private renderStructure(): HTMLElement {
    const hint = this.selectedNode
      ? `Selected ${this.selectedNode}: click another member to link/unlink`
      : "Click two members to link them; click an edge to toggle peer/hierarchy/direction";
    return el(
      "div",
      {},
      el("p", { class: "hint" }, hint),
      renderTeamGraph(
        this.draft,
        {
          onNodeClick: (id) => this.handleNodeClick(id),
          onEdgeClick: (edge) => this.handleEdgeClick(edge),
        },
        { selected: this.selectedNode },
      ),
      el(
        "p",
        { class: "hint" },
        "Hierarchical edges point from superior to subordinate; only directly connected members can interact.",
      ),
    );
  }

  private renderRoles(): HTMLElement {
    const table = el("table", { class: "roles-table" });
    const header = el("tr", {}, el("th", {}, "Member"));
    for (const role of ALL_ROLES) header.append(el("th", {}, ROLE_LABELS[role]));
    table.append(header);
    for (const member of this.draft.members) {
      const row = el("tr", {}, el("td", {}, `${member.persona.name} (${member.kind})`));
      for (const role of ALL_ROLES) {
        const checkbox = el("input", {
          type: "checkbox",
          onchange: (event) => {
            const checked = (event.target as HTMLInputElement).checked;
            member.roles = checked
              ? [...new Set([...member.roles, role])]
              : member.roles.filter((r) => r !== role);
            this.rerender();
          },
        }) as HTMLInputElement;
        checkbox.checked = member.roles.includes(role);
        row.append(el("td", {}, checkbox));
      }
      table.append(row);
    }
    return el("div", {}, table);
  }

  private personaField(
    label: string,
    value: string | number | null | undefined,
    onChange: (value: string) => void,
  ): HTMLElement {
    return el(
      "label",
      { class: "persona-field" },
      `${label} `,
      el("input", {
        type: "text",
        value: value === null || value === undefined ? "" : String(value),
        oninput: (event) => onChange((event.target as HTMLInputElement).value),
      }),
    );
  }

  private renderPersonas(): HTMLElement {
    const wrap = el("div", { class: "personas" });
    for (const member of this.draft.members) {
      const persona = member.persona;
      wrap.append(
        el(
          "fieldset",
          { class: "persona-card" },
          el("legend", {}, `${member.member_id} (${member.kind})`),
          this.personaField("Name", persona.name, (v) => {
            persona.name = v;
          }),
          this.personaField("Age", persona.social.age ?? "", (v) => {
            persona.social.age = v === "" ? null : Number(v);
          }),
          this.personaField("Gender", persona.social.gender, (v) => {
            persona.social.gender = v || null;
          }),
          this.personaField("Education", persona.social.education, (v) => {
            persona.social.education = v || null;
          }),
          this.personaField("Occupation", persona.social.occupation, (v) => {
            persona.social.occupation = v || null;
          }),
          this.personaField("Personality", persona.personal.personality, (v) => {
            persona.personal.personality = v || null;
          }),
          this.personaField("Skills", persona.personal.skills, (v) => {
            persona.personal.skills = v || null;
          }),
          this.personaField("Work style", persona.life_context.work_style, (v) => {
            persona.life_context.work_style = v || null;
          }),
          this.personaField("Likes", persona.life_context.likes, (v) => {
            persona.life_context.likes = v || null;
          }),
          this.personaField("Dislikes", persona.life_context.dislikes, (v) => {
            persona.life_context.dislikes = v || null;
          }),
        ),
      );
    }
    return wrap;
  }

  private renderSmm(): HTMLElement {
    const taskArea = el("textarea", {
      rows: "5",
      oninput: (event) => {
        this.draft.smm.task_model = (event.target as HTMLTextAreaElement).value;
      },
    }) as HTMLTextAreaElement;
    taskArea.value = this.draft.smm.task_model;
    const teamArea = el("textarea", {
      rows: "5",
      oninput: (event) => {
        this.draft.smm.team_model = (event.target as HTMLTextAreaElement).value;
      },
    }) as HTMLTextAreaElement;
    teamArea.value = this.draft.smm.team_model;
    return el(
      "div",
      {},
      el("label", {}, "Task model (procedures, outcomes, how to handle them)", taskArea),
      el("label", {}, "Team model (tendencies, beliefs, norms)", teamArea),
    );
  }

  private renderFooter(): HTMLElement {
    const violations = this.violations();
    const list = el("ul", { class: "violations", id: "violation-list" });
    for (const violation of violations) {
      list.append(
        el(
          "li",
          {},
          `${violation.rule}${violation.subject ? ` [${violation.subject}]` : ""}${
            violation.detail ? `: ${violation.detail}` : ""
          }`,
        ),
      );
    }
    const createButton = el(
      "button",
      {
        id: "create-team-btn",
        class: "primary",
        disabled: violations.length > 0,
        onclick: () => {
          if (this.isCreateEnabled()) this.callbacks.onCreate(this.draft);
        },
      },
      "Create Team",
    ) as HTMLButtonElement;
    const nav = el(
      "div",
      { class: "wizard-nav" },
      el(
        "button",
        {
          disabled: this.step === 1,
          onclick: () => {
            this.step = Math.max(1, this.step - 1);
            this.rerender();
          },
        },
        "Back",
      ),
      el(
        "button",
        {
          disabled: this.step === 5,
          onclick: () => {
            this.step = Math.min(5, this.step + 1);
            this.rerender();
          },
        },
        "Next",
      ),
      createButton,
    );
    return el("div", { class: "wizard-footer" }, list, nav);
  }
}
