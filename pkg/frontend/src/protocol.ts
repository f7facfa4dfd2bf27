/** Wire types mirroring the server's JSON schemas. */

export interface CandidateCard {
  record: number;
  weighted_delta: number;
  /** plain per-attribute increments, keyed by QI name */
  costs: Record<string, number>;
  /** the record's QI values for display */
  values: Record<string, number | string>;
}

export interface RoundProposal {
  cluster: {
    members: number[];
    generalization: Record<string, string>;
    weighted_gil: number;
  };
  candidates: CandidateCard[];
  /** index into candidates; 0 after ascending sort */
  engine_pick: number;
}

export interface SessionMetrics {
  gil: {
    unweighted: number;
    weighted: number;
    normalized_partial: number;
  };
  class_histogram: Record<string, number>;
  records_remaining: number;
  records_assigned: number;
  weights: Record<string, number>;
  phase: string;
}

export type Frame =
  | { seq: number; type: "metrics"; data: SessionMetrics }
  | { seq: number; type: "proposal"; data: RoundProposal }
  | { type: "error"; error_code: string; message: string; detail?: unknown };

export type ClientMessage =
  | { type: "choice"; record: number }
  | { type: "set_weights"; sliders: Record<string, number> }
  | { type: "autopilot" };

export interface SweepPoint {
  k: number;
  accuracy: number;
  macro_f1: number;
  gil_normalized: number;
}

export interface SweepPlot {
  target: string;
  series: Record<string, SweepPoint[]>;
}

export interface ApiErrorBody {
  error_code: string;
  message: string;
  detail?: unknown;
}
