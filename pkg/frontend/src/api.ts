// Thin HTTP client over the dispatch service plus the SSE subscription.
// Reconnects resume from the last applied seq via the `after` query param.

import type { ApiError, MissionJson, ServiceEvent, StateJson } from "./types";

export class ServiceApiError extends Error {
  constructor(
    public status: number,
    public body: ApiError
  ) {
    super(body.message);
  }
}

async function parse<T>(resp: Response): Promise<T> {
  const body = await resp.json();
  if (!resp.ok) throw new ServiceApiError(resp.status, body as ApiError);
  return body as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  submitRequest(fields: {
    id: string;
    origin: string;
    patients: number;
    kind?: string;
  }): Promise<MissionJson> {
    return fetch(`${this.base}/api/requests`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(fields),
    }).then((r) => parse<MissionJson>(r));
  }

  injectDelay(
    missionId: string,
    cause: string,
    minutes: number
  ): Promise<MissionJson> {
    return fetch(`${this.base}/api/missions/${missionId}/delays`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ cause, minutes }),
    }).then((r) => parse<MissionJson>(r));
  }

  getMission(missionId: string): Promise<MissionJson> {
    return fetch(`${this.base}/api/missions/${missionId}`).then((r) =>
      parse<MissionJson>(r)
    );
  }

  getState(): Promise<StateJson> {
    return fetch(`${this.base}/api/state`).then((r) => parse<StateJson>(r));
  }
}

export interface SubscriptionHandlers {
  onEvent: (event: ServiceEvent) => void;
  onStale: (stale: boolean) => void;
}

/** Parse a chunk of an SSE body into data payloads; returns leftover text. */
export function drainSse(
  buffer: string,
  emit: (data: string) => void
): string {
  const parts = buffer.split("\n\n");
  for (const block of parts.slice(0, -1)) {
    for (const line of block.split("\n")) {
      if (line.startsWith("data: ")) emit(line.slice(6));
    }
  }
  return parts[parts.length - 1];
}

export function subscribe(
  base: string,
  lastSeq: () => number,
  handlers: SubscriptionHandlers
): () => void {
  let stopped = false;

  async function loop() {
    while (!stopped) {
      try {
        const resp = await fetch(
          `${base}/api/events?after=${lastSeq()}&follow=true`
        );
        if (!resp.ok || !resp.body) throw new Error(`stream ${resp.status}`);
        handlers.onStale(false);
        const reader = resp.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
          const { done, value } = await reader.read();
          if (done || stopped) break;
          buffer += decoder.decode(value, { stream: true });
          buffer = drainSse(buffer, (data) => {
            if (data.trim()) handlers.onEvent(JSON.parse(data));
          });
        }
      } catch {
        // fall through to reconnect
      }
      if (!stopped) {
        handlers.onStale(true);
        await new Promise((r) => setTimeout(r, 1000));
      }
    }
  }

  void loop();
  return () => {
    stopped = true;
  };
}
