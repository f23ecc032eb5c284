// Wizard mirror, client half: every generated invalid draft must disable
// Create Team and reproduce the server's violation rules exactly (the matching
// server-side 422 check runs in the service's own suite over the same files).

import { describe, expect, test } from "vitest";

import invalidDrafts from "./fixtures/invalid_drafts.json";
import validDrafts from "./fixtures/valid_drafts.json";
import { validateTeam } from "../src/validation";
import { TeamWizard } from "../src/wizard";
import type { TeamConfig } from "../src/types";

interface InvalidEntry {
  draft: TeamConfig;
  expected_rules: string[];
}

const invalid = invalidDrafts as unknown as InvalidEntry[];
const valid = validDrafts as unknown as TeamConfig[];

describe("client validation mirrors the server", () => {
  test("fixture has the full twenty invalid drafts", () => {
    expect(invalid).toHaveLength(20);
  });

  test.each(invalid.map((entry, index) => [index, entry] as const))(
    "invalid draft %i reproduces the server's rules",
    (_index, entry) => {
      const rules = [...new Set(validateTeam(entry.draft).map((v) => v.rule))].sort();
      expect(rules).toEqual(entry.expected_rules);
    },
  );

  test.each(invalid.map((entry, index) => [index, entry] as const))(
    "invalid draft %i keeps Create Team disabled",
    (_index, entry) => {
      const wizard = new TeamWizard({ onCreate: () => undefined }, entry.draft);
      expect(wizard.isCreateEnabled()).toBe(false);
      const host = document.createElement("div");
      wizard.mount(host);
      const button = host.querySelector<HTMLButtonElement>("#create-team-btn");
      expect(button).not.toBeNull();
      expect(button!.disabled).toBe(true);
    },
  );

  test.each(valid.map((draft, index) => [index, draft] as const))(
    "valid draft %i passes and enables Create Team",
    (_index, draft) => {
      expect(validateTeam(draft)).toHaveLength(0);
      const wizard = new TeamWizard({ onCreate: () => undefined }, draft);
      const host = document.createElement("div");
      wizard.mount(host);
      const button = host.querySelector<HTMLButtonElement>("#create-team-btn");
      expect(button!.disabled).toBe(false);
    },
  );
});
