/** Recorded-style frames used by the view and store tests. */

import type { Frame, RoundProposal, SessionMetrics, SweepPlot } from "../src/protocol.js";

export function metricsFrame(seq: number, over: Partial<SessionMetrics> = {}): Frame {
  const base: SessionMetrics = {
    gil: { unweighted: 12.5, weighted: 11.25, normalized_partial: 0.125 },
    class_histogram: { "4": 2, "5": 1 },
    records_remaining: 27,
    records_assigned: 13,
    weights: { age: 1.2, country: 0.8 },
    phase: "running",
  };
  return { seq, type: "metrics", data: { ...base, ...over } };
}

export function proposalFrame(seq: number, over: Partial<RoundProposal> = {}): Frame {
  const base: RoundProposal = {
    cluster: {
      members: [0, 7],
      generalization: { age: "20-31", country: "America" },
      weighted_gil: 1.5,
    },
    candidates: [
      {
        record: 3,
        weighted_delta: 0.2,
        costs: { age: 0.1, country: 0.0 },
        values: { age: 25, country: "Canada" },
      },
      {
        record: 9,
        weighted_delta: 0.6,
        costs: { age: 0.2, country: 0.5 },
        values: { age: 44, country: "India" },
      },
      {
        record: 5,
        weighted_delta: 0.9,
        costs: { age: 0.9, country: 0.5 },
        values: { age: 61, country: "Japan" },
      },
    ],
    engine_pick: 0,
  };
  return { seq, type: "proposal", data: { ...base, ...over } };
}

export const SWEEP_PLOT: SweepPlot = {
  target: "income",
  series: {
    equal: [
      { k: 0, accuracy: 0.84, macro_f1: 0.81, gil_normalized: 0.0 },
      { k: 5, accuracy: 0.8, macro_f1: 0.77, gil_normalized: 0.21 },
      { k: 50, accuracy: 0.7, macro_f1: 0.63, gil_normalized: 0.55 },
    ],
    bias: [
      { k: 0, accuracy: 0.84, macro_f1: 0.81, gil_normalized: 0.0 },
      { k: 5, accuracy: 0.78, macro_f1: 0.75, gil_normalized: 0.24 },
      { k: 50, accuracy: 0.69, macro_f1: 0.61, gil_normalized: 0.6 },
    ],
  },
};
