/** REST and streaming clients. Framework-free: fetch + WebSocket, both
 * injectable so tests and the node harness can drive them. */

import type { ApiErrorBody, ClientMessage, Frame } from "./protocol.js";

export class ApiError extends Error {
  constructor(
    readonly errorCode: string,
    message: string,
    readonly status: number,
    readonly detail?: unknown,
  ) {
    super(message);
  }
}

type FetchFn = typeof fetch;

export class ApiClient {
  constructor(
    readonly base: string,
    private readonly fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const res = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await res.text();
    if (!res.ok) {
      let parsed: ApiErrorBody | null = null;
      try {
        parsed = JSON.parse(text) as ApiErrorBody;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(
        parsed?.error_code ?? "http_error",
        parsed?.message ?? `${res.status} on ${path}`,
        res.status,
        parsed?.detail,
      );
    }
    const type = res.headers.get("content-type") ?? "";
    return type.includes("application/json") ? JSON.parse(text) : text;
  }

  uploadDataset(payload: {
    csv: string;
    adult?: boolean;
    schema?: unknown;
    complete_only?: boolean;
    sample?: { n: number; seed?: number };
  }): Promise<{ id: string; rows: number }> {
    return this.request("POST", "/datasets", payload) as Promise<{ id: string; rows: number }>;
  }

  uploadHierarchies(trees: Record<string, unknown>): Promise<{ id: string }> {
    return this.request("POST", "/hierarchies", { trees }) as Promise<{ id: string }>;
  }

  createSession(payload: {
    dataset: string;
    hierarchies: string;
    k: number;
    weights?: unknown;
    m?: number;
  }): Promise<{ id: string; phase: string }> {
    return this.request("POST", "/sessions", payload) as Promise<{ id: string; phase: string }>;
  }

  round(sessionId: string): Promise<unknown> {
    return this.request("GET", `/sessions/${sessionId}/round`);
  }

  choose(sessionId: string, record: number): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/choice`, { record });
  }

  setWeights(sessionId: string, sliders: Record<string, number>): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/weights`, { sliders });
  }

  autopilot(sessionId: string): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/autopilot`);
  }

  metricsOf(sessionId: string): Promise<unknown> {
    return this.request("GET", `/sessions/${sessionId}/metrics`);
  }

  exportOf(sessionId: string): Promise<string> {
    return this.request("GET", `/sessions/${sessionId}/export`) as Promise<string>;
  }

  logOf(sessionId: string): Promise<string> {
    return this.request("GET", `/sessions/${sessionId}/log`) as Promise<string>;
  }

  sweepResults(jobId: string): Promise<unknown> {
    return this.request("GET", `/sweeps/${jobId}/results`);
  }
}

export interface StreamHandlers {
  onFrame: (frame: Frame) => void;
  onOpen?: () => void;
  onClose?: (willRetry: boolean) => void;
}

type WebSocketCtor = new (url: string) => WebSocket;

/** One session's stream; reconnects with backoff, the server snapshot plus
 * the store's sequence guard give resume-from-latest semantics. */
export class SessionStream {
  private ws: WebSocket | null = null;
  private closed = false;
  private retryMs = 200;

  constructor(
    private readonly url: string,
    private readonly handlers: StreamHandlers,
    private readonly wsCtor: WebSocketCtor = WebSocket,
    private readonly maxRetryMs = 5_000,
  ) {}

  connect(): void {
    if (this.closed) return;
    const ws = new this.wsCtor(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.retryMs = 200;
      this.handlers.onOpen?.();
    };
    ws.onmessage = (ev: MessageEvent) => {
      this.handlers.onFrame(JSON.parse(String(ev.data)) as Frame);
    };
    ws.onclose = () => {
      const willRetry = !this.closed;
      this.handlers.onClose?.(willRetry);
      if (willRetry) {
        setTimeout(() => this.connect(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, this.maxRetryMs);
      }
    };
  }

  send(msg: ClientMessage): void {
    if (!this.ws || this.ws.readyState !== 1) {
      throw new Error("stream is not open");
    }
    this.ws.send(JSON.stringify(msg));
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}

export function streamUrl(httpBase: string, sessionId: string): string {
  return httpBase.replace(/^http/, "ws") + `/sessions/${sessionId}/stream`;
}
