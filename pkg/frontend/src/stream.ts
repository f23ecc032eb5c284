// NDJSON event-stream client with automatic resume.
//
// Delivery contract: events reach the callback strictly in sequence order with
// no gaps and no duplicates, across any number of disconnects. On connection
// loss the client reconnects with from_seq = next expected sequence number;
// anything older is dropped, and a server-side gap forces a clean reconnect.

import type { SessionEvent } from "./types";

export type StreamStatus = "connected" | "reconnecting" | "closed";

export interface StreamOptions {
  onEvent: (event: SessionEvent) => void;
  onStatus?: (status: StreamStatus) => void;
  fetchFn?: typeof fetch;
  retryDelayMs?: number;
  maxRetries?: number;
}

export class EventStream {
  nextSeq = 0;
  private stopped = false;
  private readonly fetchFn: typeof fetch;
  private readonly retryDelayMs: number;
  private readonly maxRetries: number;

  constructor(
    private readonly eventsUrl: string,
    private readonly options: StreamOptions,
  ) {
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
    this.retryDelayMs = options.retryDelayMs ?? 1000;
    this.maxRetries = options.maxRetries ?? Number.POSITIVE_INFINITY;
  }

  stop(): void {
    this.stopped = true;
  }

  async run(): Promise<void> {
    let attempts = 0;
    while (!this.stopped && attempts <= this.maxRetries) {
      try {
        const finished = await this.consumeOnce();
        if (finished) {
          this.options.onStatus?.("closed");
          return;
        }
      } catch {
        // fall through to reconnect
      }
      if (this.stopped) break;
      attempts += 1;
      this.options.onStatus?.("reconnecting");
      await new Promise((resolve) => setTimeout(resolve, this.retryDelayMs));
    }
    this.options.onStatus?.("closed");
  }

  /** One connection; resolves true when the session's final event arrived. */
  private async consumeOnce(): Promise<boolean> {
    const separator = this.eventsUrl.includes("?") ? "&" : "?";
    const response = await this.fetchFn(`${this.eventsUrl}${separator}from_seq=${this.nextSeq}`);
    if (!response.ok || response.body === null) {
      throw new Error(`stream unavailable: ${response.status}`);
    }
    this.options.onStatus?.("connected");
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (this.stopped) {
        await reader.cancel().catch(() => undefined);
        return true;
      }
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let newline = buffer.indexOf("\n");
      while (newline >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        newline = buffer.indexOf("\n");
        if (!line) continue;
        const event = JSON.parse(line) as SessionEvent;
        if (event.seq < this.nextSeq) continue; // duplicate after resume
        if (event.seq > this.nextSeq) {
          // server-side gap: resync from the expected position
          await reader.cancel().catch(() => undefined);
          throw new Error(`sequence gap: expected ${this.nextSeq}, got ${event.seq}`);
        }
        this.nextSeq = event.seq + 1;
        this.options.onEvent(event);
        if (event.type === "session_ended") {
          await reader.cancel().catch(() => undefined);
          return true;
        }
      }
    }
    return false; // connection ended without the final event: resume
  }
}
