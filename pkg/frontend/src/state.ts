/** Server-authoritative view state. Every rendered number comes from a
 * received frame (or a loaded sweep file); frames apply strictly in
 * sequence order and stale ones are dropped. */

import type { Frame, RoundProposal, SessionMetrics, SweepPlot } from "./protocol.js";

export type Connection = "idle" | "connecting" | "open" | "closed";

export interface ViewState {
  sessionId: string | null;
  connection: Connection;
  /** highest frame sequence applied */
  lastSeq: number;
  metrics: SessionMetrics | null;
  metricsSeq: number;
  proposal: RoundProposal | null;
  proposalSeq: number;
  /** a mutation is in flight; candidate cards disable until the next frame */
  busy: boolean;
  droppedFrames: number;
  lastError: string | null;
  sweep: SweepPlot | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    connection: "idle",
    lastSeq: -1,
    metrics: null,
    metricsSeq: -1,
    proposal: null,
    proposalSeq: -1,
    busy: false,
    droppedFrames: 0,
    lastError: null,
    sweep: null,
  };
}

export type Listener = (state: ViewState) => void;

export class SessionStore {
  state: ViewState = initialState();
  private listeners: Listener[] = [];
  /** audit trail: every (seq, normalized GIL) ever applied, for traceability */
  readonly appliedGil: { seq: number; value: number }[] = [];

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const l of this.listeners) l(this.state);
  }

  setSession(id: string): void {
    this.state = { ...initialState(), sessionId: id, sweep: this.state.sweep };
    this.emit();
  }

  setConnection(conn: Connection): void {
    this.state = { ...this.state, connection: conn };
    this.emit();
  }

  setBusy(busy: boolean): void {
    this.state = { ...this.state, busy };
    this.emit();
  }

  setSweep(plot: SweepPlot | null, error: string | null = null): void {
    this.state = { ...this.state, sweep: plot, lastError: error };
    this.emit();
  }

  /** Apply one server frame. Returns false when the frame is stale. */
  applyFrame(frame: Frame): boolean {
    if (frame.type === "error") {
      this.state = { ...this.state, lastError: `${frame.error_code}: ${frame.message}`, busy: false };
      this.emit();
      return true;
    }
    if (frame.seq <= this.state.lastSeq) {
      this.state = { ...this.state, droppedFrames: this.state.droppedFrames + 1 };
      this.emit();
      return false;
    }
    if (frame.type === "metrics") {
      this.appliedGil.push({ seq: frame.seq, value: frame.data.gil.normalized_partial });
      this.state = {
        ...this.state,
        lastSeq: frame.seq,
        metrics: frame.data,
        metricsSeq: frame.seq,
        busy: false,
        lastError: null,
      };
    } else {
      this.state = {
        ...this.state,
        lastSeq: frame.seq,
        proposal: frame.data,
        proposalSeq: frame.seq,
        busy: false,
      };
    }
    this.emit();
    return true;
  }
}

/** Validate a sweep plot file; throws with a readable message when malformed. */
export function parseSweepPlot(raw: unknown): SweepPlot {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("plot file is not a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  if (typeof obj.target !== "string" || typeof obj.series !== "object" || obj.series === null) {
    throw new Error("plot file needs {target, series}");
  }
  for (const [regime, pts] of Object.entries(obj.series as Record<string, unknown>)) {
    if (!Array.isArray(pts)) throw new Error(`series ${regime} is not an array`);
    for (const p of pts) {
      const point = p as Record<string, unknown>;
      for (const field of ["k", "accuracy", "macro_f1"]) {
        if (typeof point[field] !== "number") {
          throw new Error(`series ${regime} has a point without numeric ${field}`);
        }
      }
    }
  }
  return raw as SweepPlot;
}
