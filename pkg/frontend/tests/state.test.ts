import assert from "node:assert/strict";
import { test } from "node:test";

import { SessionStore, parseSweepPlot } from "../src/state.js";
import { metricsFrame, proposalFrame, SWEEP_PLOT } from "./fixtures.js";

test("frames apply in order and update the right slots", () => {
  const store = new SessionStore();
  assert.equal(store.applyFrame(metricsFrame(0)), true);
  assert.equal(store.applyFrame(proposalFrame(1)), true);
  assert.equal(store.state.metricsSeq, 0);
  assert.equal(store.state.proposalSeq, 1);
  assert.equal(store.state.lastSeq, 1);
  assert.equal(store.state.metrics?.records_remaining, 27);
  assert.equal(store.state.proposal?.candidates.length, 3);
});

test("out-of-order frames are dropped by the sequence guard", () => {
  const store = new SessionStore();
  store.applyFrame(metricsFrame(0));
  store.applyFrame(proposalFrame(1));
  const stale = metricsFrame(0, { records_remaining: 999 });
  assert.equal(store.applyFrame(stale), false);
  assert.equal(store.state.metrics?.records_remaining, 27);
  assert.equal(store.state.droppedFrames, 1);
  // a duplicate of the latest seq is also stale
  assert.equal(store.applyFrame(proposalFrame(1)), false);
  assert.equal(store.state.droppedFrames, 2);
});

test("rendered GIL values are traceable to received frames", () => {
  const store = new SessionStore();
  const sent = [0.125, 0.3, 0.62];
  sent.forEach((value, i) =>
    store.applyFrame(
      metricsFrame(i, {
        gil: { unweighted: 1, weighted: 1, normalized_partial: value },
      }),
    ),
  );
  assert.deepEqual(
    store.appliedGil.map((g) => g.value),
    sent,
  );
  // the currently rendered value is the last applied frame's value
  assert.equal(store.state.metrics?.gil.normalized_partial, 0.62);
});

test("error frames surface without touching sequence state", () => {
  const store = new SessionStore();
  store.applyFrame(metricsFrame(0));
  store.applyFrame({ type: "error", error_code: "oracle_error", message: "nope" });
  assert.equal(store.state.lastError, "oracle_error: nope");
  assert.equal(store.state.lastSeq, 0);
  // the next good frame clears the error
  store.applyFrame(metricsFrame(1));
  assert.equal(store.state.lastError, null);
});

test("busy flag clears when any frame lands", () => {
  const store = new SessionStore();
  store.setBusy(true);
  assert.equal(store.state.busy, true);
  store.applyFrame(proposalFrame(0));
  assert.equal(store.state.busy, false);
});

test("parseSweepPlot accepts valid files and rejects malformed ones", () => {
  assert.deepEqual(parseSweepPlot(SWEEP_PLOT), SWEEP_PLOT);
  assert.throws(() => parseSweepPlot(null), /not a JSON object/);
  assert.throws(() => parseSweepPlot({ target: "x" }), /needs \{target, series\}/);
  assert.throws(
    () => parseSweepPlot({ target: "x", series: { a: [{ k: "zero" }] } }),
    /numeric k/,
  );
});
