import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { DEFAULT_POLL_INTERVAL_MS, startEventFeed } from "../src/events.js";

describe("event feed polling fallback", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("polls every two seconds when SSE is unavailable", async () => {
    const poll = vi.fn().mockResolvedValue(undefined);
    const connectivity: boolean[] = [];
    const handle = startEventFeed("", {
      onEvent: () => {},
      onConnectivity: (c) => connectivity.push(c),
      poll,
    });
    expect(handle.mode).toBe("poll");
    await vi.advanceTimersByTimeAsync(3 * DEFAULT_POLL_INTERVAL_MS);
    expect(poll).toHaveBeenCalledTimes(3);
    expect(connectivity).toEqual([true, true, true]);
    handle.stop();
    await vi.advanceTimersByTimeAsync(5 * DEFAULT_POLL_INTERVAL_MS);
    expect(poll).toHaveBeenCalledTimes(3);
  });

  it("reports lost connectivity when polling fails", async () => {
    const poll = vi.fn().mockRejectedValue(new Error("down"));
    const connectivity: boolean[] = [];
    const handle = startEventFeed(
      "",
      { onEvent: () => {}, onConnectivity: (c) => connectivity.push(c), poll },
      { pollIntervalMs: 100 },
    );
    await vi.advanceTimersByTimeAsync(250);
    expect(connectivity).toEqual([false, false]);
    handle.stop();
  });
});

describe("event feed over SSE", () => {
  class FakeEventSource {
    onmessage: ((m: MessageEvent<string>) => void) | null = null;
    onerror: (() => void) | null = null;
    closed = false;
    constructor(public url: string) {}
    close(): void {
      this.closed = true;
    }
  }

  it("parses pushed frames and falls back to polling on error", async () => {
    vi.useFakeTimers();
    try {
      let source!: FakeEventSource;
      const events: unknown[] = [];
      const poll = vi.fn().mockResolvedValue(undefined);
      const handle = startEventFeed(
        "http://daemon",
        { onEvent: (e) => events.push(e), onConnectivity: () => {}, poll },
        {
          pollIntervalMs: 100,
          eventSourceFactory: (url) => {
            source = new FakeEventSource(url);
            return source as unknown as EventSource;
          },
        },
      );
      expect(handle.mode).toBe("sse");
      expect(source.url).toBe("http://daemon/v1/events");

      source.onmessage!({ data: '{"kind":"block","ts":1}' } as MessageEvent<string>);
      expect(events).toEqual([{ kind: "block", ts: 1 }]);

      source.onerror!();
      expect(source.closed).toBe(true);
      await vi.advanceTimersByTimeAsync(350);
      expect(poll).toHaveBeenCalledTimes(3);
      handle.stop();
    } finally {
      vi.useRealTimers();
    }
  });
});
