/**
 * Live update feed: server-sent events when available, 2 s polling otherwise
 * (or after the stream errors). The caller supplies callbacks; this module
 * owns reconnect/fallback mechanics only.
 */

export interface FeedCallbacks {
  onEvent: (event: unknown) => void;
  /** Fired on connectivity transitions; drives the offline banner. */
  onConnectivity: (connected: boolean) => void;
  /** Polling fallback: refresh whole views from the REST endpoints. */
  poll: () => Promise<void>;
}

export interface FeedOptions {
  pollIntervalMs?: number;
  /** Factory for EventSource; pass undefined where SSE is unavailable. */
  eventSourceFactory?: (url: string) => EventSource;
}

export interface FeedHandle {
  stop: () => void;
  readonly mode: "sse" | "poll";
}

export const DEFAULT_POLL_INTERVAL_MS = 2000;

export function startEventFeed(
  baseUrl: string,
  callbacks: FeedCallbacks,
  options: FeedOptions = {},
): FeedHandle {
  const interval = options.pollIntervalMs ?? DEFAULT_POLL_INTERVAL_MS;
  let timer: ReturnType<typeof setInterval> | null = null;
  let source: EventSource | null = null;
  let stopped = false;

  const startPolling = (): void => {
    if (stopped || timer !== null) return;
    timer = setInterval(() => {
      callbacks
        .poll()
        .then(() => callbacks.onConnectivity(true))
        .catch(() => callbacks.onConnectivity(false));
    }, interval);
  };

  const factory = options.eventSourceFactory;
  if (factory !== undefined) {
    source = factory(`${baseUrl}/v1/events`);
    source.onmessage = (message: MessageEvent<string>) => {
      callbacks.onConnectivity(true);
      try {
        callbacks.onEvent(JSON.parse(message.data));
      } catch {
        /* malformed frame; ignore */
      }
    };
    source.onerror = () => {
      callbacks.onConnectivity(false);
      source?.close();
      source = null;
      startPolling();
    };
    return {
      stop: () => {
        stopped = true;
        source?.close();
        if (timer !== null) clearInterval(timer);
      },
      mode: "sse",
    };
  }

  startPolling();
  return {
    stop: () => {
      stopped = true;
      if (timer !== null) clearInterval(timer);
    },
    mode: "poll",
  };
}
