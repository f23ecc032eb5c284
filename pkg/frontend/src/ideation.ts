// Live ideation screen: idea cards, team status graph with phase badges, the
// ordered chat feed, and the composer. Everything renders from the event fold,
// so the screen always matches stream order. Agent-to-agent transcripts are
// collapsed to a one-line summary with expand-on-click.

import { Api } from "./api";
import { clear, el } from "./dom";
import { composerOptions, evaluationsOf, statusBadge, type SessionState } from "./fold";
import { renderTeamGraph } from "./graph";
import type { ChatItem } from "./fold";
import { ROLE_LABELS, type RoleKind } from "./types";
import { humanOf } from "./validation";

export interface IdeationCallbacks {
  onEndSession: () => void;
}

export class IdeationView {
  private container: HTMLElement | null = null;
  private expandedThreads = new Set<string>();
  private detailIdea: string | null = null;
  banner: string | null = null;

  constructor(
    private api: Api,
    private sessionId: string,
    private state: SessionState,
    private callbacks: IdeationCallbacks,
  ) {}

  mount(container: HTMLElement): void {
    this.container = container;
    this.render();
  }

  setBanner(text: string | null): void {
    this.banner = text;
    this.render();
  }

  render(): void {
    const container = this.container;
    if (!container) return;
    clear(container);
    const config = this.state.config;
    if (!config) {
      container.append(el("p", {}, "Waiting for the session to begin..."));
      return;
    }
    const header = el(
      "div",
      { class: "session-header" },
      el("h2", {}, `${config.team_name} — ${config.topic || "ideation"}`),
      el(
        "button",
        { class: "primary", id: "end-session-btn", onclick: () => this.callbacks.onEndSession() },
        "Review Team Ideation",
      ),
    );
    container.append(header);
    if (this.banner) {
      container.append(el("div", { class: "banner", id: "stream-banner" }, this.banner));
    }
    const columns = el("div", { class: "ideation-columns" });
    columns.append(this.renderStatusPanel(), this.renderChatPanel(), this.renderIdeaPanel());
    container.append(columns);
  }

  private renderStatusPanel(): HTMLElement {
    const config = this.state.config!;
    const badges = new Map<string, string>();
    for (const member of config.members) {
      if (member.kind === "agent") badges.set(member.member_id, statusBadge(this.state, member.member_id));
    }
    const roleList = el("ul", { class: "member-roles" });
    for (const member of config.members) {
      roleList.append(
        el(
          "li",
          {},
          `${member.persona.name}: ${member.roles.map((r) => ROLE_LABELS[r]).join(", ")}`,
        ),
      );
    }
    return el(
      "section",
      { class: "panel status-panel" },
      el("h3", {}, "Team status"),
      renderTeamGraph(config, {}, { badges }),
      roleList,
    );
  }

  private chatLine(item: ChatItem): HTMLElement {
    if (item.kind === "system" || !item.threadRef) {
      return el("div", { class: "chat-item system" }, item.text);
    }
    return el(
      "div",
      { class: "chat-item message" },
      el("span", { class: "chat-author" }, `${item.author}: `),
      item.text,
    );
  }

  private renderChatPanel(): HTMLElement {
    const humanId = humanOf(this.state.config!);
    const feed = el("div", { class: "chat-feed", id: "chat-feed" });
    const agentThreadBuffer = new Map<string, ChatItem[]>();

    const flushCollapsed = (ref: string) => {
      const items = agentThreadBuffer.get(ref);
      if (!items || items.length === 0) return;
      agentThreadBuffer.delete(ref);
      const thread = this.state.threads.get(ref);
      const label = thread
        ? `${thread.initiator} ↔ ${thread.recipient}: ${items.length} feedback messages`
        : `${items.length} feedback messages`;
      if (this.expandedThreads.has(ref)) {
        const block = el("div", { class: "collapsed-thread expanded" });
        block.append(
          el(
            "div",
            {
              class: "thread-summary clickable",
              onclick: () => {
                this.expandedThreads.delete(ref);
                this.render();
              },
            },
            `▾ ${label}`,
          ),
        );
        for (const item of items) block.append(this.chatLine(item));
        feed.append(block);
      } else {
        feed.append(
          el(
            "div",
            {
              class: "collapsed-thread clickable",
              "data-thread": ref,
              onclick: () => {
                this.expandedThreads.add(ref);
                this.render();
              },
            },
            `▸ ${label}`,
          ),
        );
      }
    };

    let bufferedRef: string | null = null;
    for (const item of this.state.chat) {
      const thread = item.threadRef ? this.state.threads.get(item.threadRef) : undefined;
      const agentOnly =
        thread !== undefined && thread.initiator !== humanId && thread.recipient !== humanId;
      if (agentOnly && item.kind === "message") {
        if (bufferedRef !== null && bufferedRef !== item.threadRef) flushCollapsed(bufferedRef);
        bufferedRef = item.threadRef!;
        const buffer = agentThreadBuffer.get(bufferedRef) ?? [];
        buffer.push(item);
        agentThreadBuffer.set(bufferedRef, buffer);
        continue;
      }
      if (bufferedRef !== null) {
        flushCollapsed(bufferedRef);
        bufferedRef = null;
      }
      feed.append(this.chatLine(item));
    }
    if (bufferedRef !== null) flushCollapsed(bufferedRef);

    return el(
      "section",
      { class: "panel chat-panel" },
      el("h3", {}, "Team chat"),
      feed,
      this.renderComposer(),
    );
  }

  private renderComposer(): HTMLElement {
    const options = composerOptions(this.state);
    const humanId = humanOf(this.state.config!);
    const wrap = el("div", { class: "composer", id: "composer" });

    if (options.canGenerate) {
      wrap.append(
        el(
          "button",
          { id: "generate-idea-btn", onclick: () => this.showIdeaForm(null) },
          "Create New Idea",
        ),
      );
    }

    const openThread = [...this.state.threads.values()].find(
      (t) => t.open && (t.initiator === humanId || t.recipient === humanId),
    );
    if (openThread) {
      const replyInput = el("input", { type: "text", placeholder: "Reply in the open feedback session" }) as HTMLInputElement;
      const conclude = el("input", { type: "checkbox" }) as HTMLInputElement;
      wrap.append(
        el(
          "div",
          { class: "composer-row" },
          replyInput,
          el("label", {}, conclude, " conclude"),
          el(
            "button",
            {
              onclick: async () => {
                if (!replyInput.value) return;
                await this.submitSafely({
                  kind: "feedback_reply",
                  session_ref: openThread.ref,
                  message: replyInput.value,
                  conclude: conclude.checked,
                });
              },
            },
            "Reply",
          ),
        ),
      );
    }

    const kinds: ("feedback" | "request")[] = [];
    if (options.canFeedback) kinds.push("feedback");
    if (options.canRequest) kinds.push("request");
    if (kinds.length > 0 && options.recipients.length > 0) {
      const kindSelect = el("select", { id: "composer-kind" }) as HTMLSelectElement;
      for (const kind of kinds) {
        kindSelect.append(el("option", { value: kind }, kind === "feedback" ? "Feedback" : "Request"));
      }
      const recipientSelect = el("select", { id: "composer-recipient" }) as HTMLSelectElement;
      for (const recipient of options.recipients) {
        recipientSelect.append(el("option", { value: recipient }, recipient));
      }
      const actionSelect = el("select", { id: "composer-action" }) as HTMLSelectElement;
      const syncActions = () => {
        clear(actionSelect);
        const requestable = options.requestableBy.get(recipientSelect.value) ?? [];
        for (const role of requestable) {
          actionSelect.append(el("option", { value: role }, ROLE_LABELS[role as RoleKind]));
        }
        actionSelect.style.display = kindSelect.value === "request" ? "" : "none";
      };
      kindSelect.addEventListener("change", syncActions);
      recipientSelect.addEventListener("change", syncActions);
      syncActions();
      const messageInput = el("input", {
        type: "text",
        id: "composer-message",
        placeholder: "Message...",
      }) as HTMLInputElement;
      wrap.append(
        el(
          "div",
          { class: "composer-row" },
          kindSelect,
          recipientSelect,
          actionSelect,
          messageInput,
          el(
            "button",
            {
              id: "composer-send",
              onclick: async () => {
                if (!messageInput.value) return;
                if (kindSelect.value === "feedback") {
                  await this.submitSafely({
                    kind: "open_feedback",
                    recipient: recipientSelect.value,
                    message: messageInput.value,
                  });
                } else {
                  await this.submitSafely({
                    kind: "request",
                    recipient: recipientSelect.value,
                    action: actionSelect.value,
                    text: messageInput.value,
                  });
                }
                messageInput.value = "";
              },
            },
            "Send",
          ),
        ),
      );
    }
    return wrap;
  }

  private renderIdeaPanel(): HTMLElement {
    const options = composerOptions(this.state);
    const list = el("div", { class: "idea-list", id: "idea-list" });
    for (const idea of [...this.state.ideas].reverse()) {
      const evals = evaluationsOf(this.state, idea.idea_id);
      const card = el(
        "article",
        { class: "idea-card", "data-idea": idea.idea_id },
        el("h4", {}, idea.title || idea.idea_id),
        el("p", { class: "idea-meta" }, `${idea.idea_id} · by ${idea.author} · ${evals.length} evaluations`),
        el(
          "button",
          {
            class: "link",
            onclick: () => {
              this.detailIdea = this.detailIdea === idea.idea_id ? null : idea.idea_id;
              this.render();
            },
          },
          this.detailIdea === idea.idea_id ? "Hide details" : "See more details",
        ),
      );
      if (this.detailIdea === idea.idea_id) {
        card.append(this.renderIdeaDetail(idea.idea_id, options.canEvaluate, options.canGenerate));
      }
      list.append(card);
    }
    return el("section", { class: "panel idea-panel" }, el("h3", {}, "Ideas"), list);
  }

  private renderIdeaDetail(ideaId: string, canEvaluate: boolean, canUpdate: boolean): HTMLElement {
    const idea = this.state.ideas.find((i) => i.idea_id === ideaId)!;
    const detail = el(
      "div",
      { class: "idea-detail" },
      el("p", {}, el("strong", {}, "Object: "), idea.object),
      el("p", {}, el("strong", {}, "Function: "), idea.function),
      el("p", {}, el("strong", {}, "Behavior: "), idea.behavior),
      el("p", {}, el("strong", {}, "Structure: "), idea.structure),
    );
    const evals = evaluationsOf(this.state, ideaId);
    if (evals.length > 0) {
      const evalList = el("ul", { class: "evaluation-list" });
      for (const e of evals) {
        evalList.append(
          el(
            "li",
            {},
            `${e.evaluator} — Novelty: ${e.novelty}, Completeness: ${e.completeness}, Quality: ${e.quality}` +
              (e.comment ? ` — "${e.comment}"` : ""),
          ),
        );
      }
      detail.append(el("h5", {}, "Evaluations"), evalList);
    }
    if (canEvaluate) detail.append(this.renderEvaluateForm(ideaId));
    if (canUpdate) {
      detail.append(
        el("button", { class: "link", onclick: () => this.showIdeaForm(ideaId) }, "Update Idea"),
      );
    }
    return detail;
  }

  private renderEvaluateForm(ideaId: string): HTMLElement {
    const scoreInput = (labelText: string) => {
      const input = el("input", { type: "number", min: "1", max: "7", value: "4" }) as HTMLInputElement;
      return { label: el("label", {}, `${labelText} `, input), input };
    };
    const novelty = scoreInput("Novelty");
    const completeness = scoreInput("Completeness");
    const quality = scoreInput("Quality");
    const comment = el("input", { type: "text", placeholder: "Comment (optional)" }) as HTMLInputElement;
    return el(
      "div",
      { class: "evaluate-form" },
      el("h5", {}, "Evaluate idea"),
      novelty.label,
      completeness.label,
      quality.label,
      comment,
      el(
        "button",
        {
          onclick: async () => {
            await this.submitSafely({
              kind: "evaluate_idea",
              idea_id: ideaId,
              novelty: Number(novelty.input.value),
              completeness: Number(completeness.input.value),
              quality: Number(quality.input.value),
              comment: comment.value || null,
            });
          },
        },
        "Submit evaluation",
      ),
    );
  }

  private showIdeaForm(parentId: string | null): void {
    const container = this.container;
    if (!container) return;
    const existing = container.querySelector(".idea-form");
    if (existing) existing.remove();
    const parent = parentId ? this.state.ideas.find((i) => i.idea_id === parentId) : null;
    const field = (labelText: string, value = "") => {
      const input = el("input", { type: "text", value }) as HTMLInputElement;
      return { label: el("label", {}, `${labelText} `, input), input };
    };
    const title = field("Title", parent ? `${parent.title} (revised)` : "");
    const object = field("Object", parent?.object ?? "");
    const func = field("Function", parent?.function ?? "");
    const behavior = field("Behavior", parent?.behavior ?? "");
    const structure = field("Structure", parent?.structure ?? "");
    const form = el(
      "div",
      { class: "idea-form panel" },
      el("h4", {}, parentId ? `Update ${parentId}` : "Create new idea"),
      title.label, object.label, func.label, behavior.label, structure.label,
      el(
        "button",
        {
          class: "primary",
          onclick: async () => {
            const payload: Record<string, unknown> = {
              kind: parentId ? "update_idea" : "generate_idea",
              title: title.input.value,
              object: object.input.value,
              function: func.input.value,
              behavior: behavior.input.value,
              structure: structure.input.value,
            };
            if (parentId) payload.parent_id = parentId;
            await this.submitSafely(payload);
            form.remove();
          },
        },
        "Submit",
      ),
      el("button", { onclick: () => form.remove() }, "Cancel"),
    );
    container.append(form);
  }

  private async submitSafely(action: Record<string, unknown>): Promise<void> {
    try {
      await this.api.submitAction(this.sessionId, action);
    } catch (error) {
      this.setBanner(`Action rejected: ${error instanceof Error ? error.message : String(error)}`);
      window.setTimeout(() => this.setBanner(null), 4000);
    }
  }
}
