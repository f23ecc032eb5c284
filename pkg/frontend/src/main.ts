// App shell: the form -> ideate -> reflect -> reform cycle.

import { Api } from "./api";
import { applyEvent, emptyState, type SessionState } from "./fold";
import { IdeationView } from "./ideation";
import { ReflectionView } from "./reflection";
import { EventStream } from "./stream";
import type { TeamConfig } from "./types";
import { TeamWizard } from "./wizard";
import "./style.css";

const api = new Api(import.meta.env?.DEV ? "/api" : "");

function root(): HTMLElement {
  return document.getElementById("app")!;
}

function showWizard(previous?: TeamConfig): void {
  const wizard = new TeamWizard(
    {
      onCreate: async (draft) => {
        try {
          const { team_id } = await api.createTeam(draft);
          const { session_id } = await api.createSession(team_id, { time_scale: 1.0, autorun: true });
          showIdeation(session_id);
        } catch (error) {
          // Server re-validates; surface anything the mirror missed.
          window.alert(`Could not create the team: ${error instanceof Error ? error.message : error}`);
        }
      },
    },
    previous,
  );
  wizard.mount(root());
}

function showIdeation(sessionId: string): void {
  const state: SessionState = emptyState();
  const view = new IdeationView(api, sessionId, state, {
    onEndSession: async () => {
      stream.stop();
      await api.endSession(sessionId);
      await showReflection(sessionId);
    },
  });
  view.mount(root());

  const stream = new EventStream(api.eventsUrl(sessionId), {
    onEvent: (event) => {
      applyEvent(state, event);
      if (event.type === "session_ended") {
        void showReflection(sessionId);
        return;
      }
      view.render();
    },
    onStatus: (status) => {
      if (status === "reconnecting") view.setBanner("Connection lost — reconnecting…");
      else if (status === "connected") view.setBanner(null);
    },
  });
  void stream.run();
}

async function showReflection(sessionId: string): Promise<void> {
  const payload = await api.reflection(sessionId);
  const { entries } = await api.timeline(sessionId);
  // the sealed log's opening event carries the config snapshot
  const statusResponse = await fetch(`${api.baseUrl}/sessions/${sessionId}/events?from_seq=0`);
  const firstLine = (await statusResponse.text()).split("\n", 1)[0];
  const config = (JSON.parse(firstLine) as { config: TeamConfig }).config;

  const view = new ReflectionView(config, payload, entries, {
    onReform: () => showWizard(config),
    onTimelineFilter: async (member) => {
      const filtered = await api.timeline(sessionId, member ?? undefined);
      view.setTimeline(filtered.entries);
    },
  });
  view.mount(root());
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  showWizard();
}
