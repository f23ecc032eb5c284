// Wizard mechanics: size bounds, resizing, edge cycling, reform prefill.

import { beforeEach, describe, expect, test } from "vitest";

import { defaultDraft, TeamWizard } from "../src/wizard";
import type { TeamConfig } from "../src/types";

let host: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  host = document.createElement("div");
  document.body.append(host);
});

function mountWizard(initial?: TeamConfig): TeamWizard {
  const wizard = new TeamWizard({ onCreate: () => undefined }, initial);
  wizard.mount(host);
  return wizard;
}

describe("team wizard", () => {
  test("size slider is bounded to 3..6", () => {
    mountWizard();
    const slider = host.querySelector("#team-size") as HTMLInputElement;
    expect(slider.min).toBe("3");
    expect(slider.max).toBe("6");
  });

  test("slider input grows and shrinks the member list", () => {
    const wizard = mountWizard();
    const slider = host.querySelector("#team-size") as HTMLInputElement;
    slider.value = "6";
    slider.dispatchEvent(new Event("input"));
    expect(wizard.draft.members).toHaveLength(6);
    expect(wizard.draft.members.filter((m) => m.kind === "human")).toHaveLength(1);

    const slider2 = host.querySelector("#team-size") as HTMLInputElement;
    slider2.value = "3";
    slider2.dispatchEvent(new Event("input"));
    expect(wizard.draft.members).toHaveLength(3);
    const ids = new Set(wizard.draft.members.map((m) => m.member_id));
    for (const edge of wizard.draft.edges) {
      expect(ids.has(edge.a) && ids.has(edge.b)).toBe(true);
    }
  });

  test("default draft is immediately valid", () => {
    const wizard = mountWizard();
    expect(wizard.isCreateEnabled()).toBe(true);
    const button = host.querySelector("#create-team-btn") as HTMLButtonElement;
    expect(button.disabled).toBe(false);
  });

  test("edge click cycles peer, forward hierarchy, reversed hierarchy, peer", () => {
    const wizard = mountWizard();
    wizard.step = 2;
    wizard.render();
    const before = wizard.draft.edges[0];
    expect(before.kind).toBe("peer");
    const clickEdge = () => (host.querySelector("line.edge") as SVGElement).dispatchEvent(
      new Event("click", { bubbles: true }),
    );
    clickEdge();
    const forward = wizard.draft.edges[0];
    expect(forward.kind).toBe("hierarchical");
    expect([forward.a, forward.b]).toEqual([before.a, before.b]);
    clickEdge();
    const reversed = wizard.draft.edges[0];
    expect(reversed.kind).toBe("hierarchical");
    expect([reversed.a, reversed.b]).toEqual([before.b, before.a]);
    clickEdge();
    expect(wizard.draft.edges[0].kind).toBe("peer");
  });

  test("clicking two nodes links and unlinks them", () => {
    const wizard = mountWizard();
    wizard.step = 2;
    wizard.render();
    const edgesBefore = wizard.draft.edges.length;
    const agent1 = host.querySelector('[data-member="agent-1"]')!;
    const agent2 = host.querySelector('[data-member="agent-2"]')!;
    agent1.dispatchEvent(new Event("click", { bubbles: true }));
    host.querySelector('[data-member="agent-2"]')!.dispatchEvent(new Event("click", { bubbles: true }));
    expect(wizard.draft.edges.length).toBe(edgesBefore + 1);
    // same pair again removes the edge
    host.querySelector('[data-member="agent-1"]')!.dispatchEvent(new Event("click", { bubbles: true }));
    host.querySelector('[data-member="agent-2"]')!.dispatchEvent(new Event("click", { bubbles: true }));
    expect(wizard.draft.edges.length).toBe(edgesBefore);
    void agent2;
  });

  test("reform prefills the previous config without sharing state", () => {
    const previous = defaultDraft(5);
    previous.team_name = "Cycle 2 team";
    const wizard = mountWizard(previous);
    expect(wizard.draft.team_name).toBe("Cycle 2 team");
    expect(wizard.draft.members).toHaveLength(5);
    wizard.draft.team_name = "mutated";
    expect(previous.team_name).toBe("Cycle 2 team");
  });

  test("emptying a member's roles disables Create Team live", () => {
    const wizard = mountWizard();
    wizard.step = 3;
    wizard.render();
    const firstAgentRow = host.querySelectorAll(".roles-table tr")[2];
    const checked = firstAgentRow.querySelectorAll("input:checked");
    checked.forEach((box) => {
      (box as HTMLInputElement).checked = false;
      box.dispatchEvent(new Event("change"));
    });
    const button = host.querySelector("#create-team-btn") as HTMLButtonElement;
    expect(button.disabled).toBe(true);
    const violations = host.querySelector("#violation-list")!.textContent;
    expect(violations).toContain("EmptyRoles");
  });
});
