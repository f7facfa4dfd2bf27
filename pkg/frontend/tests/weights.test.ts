import assert from "node:assert/strict";
import { test } from "node:test";

import { validateSliders, weightPanel } from "../src/weights.js";
import { findAll, textOf } from "../src/vdom.js";

test("validateSliders accepts one-positive and rejects all-zero", () => {
  assert.equal(validateSliders({ a: 0.0, b: 0.4 }), null);
  assert.equal(validateSliders({ a: 0, b: 0 }), "at least one slider must be above zero");
  assert.match(validateSliders({ a: 1.2, b: 0.4 })!, /within \[0, 1\]/);
});

test("panel renders a slider per QI plus read-only engine bars", () => {
  const view = weightPanel({
    sliders: { age: 0.8, country: 0.2 },
    engineWeights: { age: 1.5, country: 0.5 },
    onRelease: () => {},
    onSlide: () => {},
  });
  const inputs = findAll(view, (n) => n.tag === "input");
  assert.deepEqual(inputs.map((i) => i.attrs["data-attr"]), ["age", "country"]);
  const engine = findAll(view, (n) => n.attrs.class === "engine-fill");
  assert.deepEqual(engine.map((e) => e.attrs["data-weight"]), ["1.500000", "0.500000"]);
  assert.equal(engine[0].attrs.style, "width:100.00%");
});

test("release sends the sliders only when valid", () => {
  const sent: Record<string, number>[] = [];
  const valid = weightPanel({
    sliders: { age: 0.7, country: 0.3 },
    engineWeights: {},
    onRelease: (s) => sent.push(s),
    onSlide: () => {},
  });
  const slider = findAll(valid, (n) => n.tag === "input")[0];
  slider.on?.change?.(new Event("change"));
  assert.deepEqual([...sent], [{ age: 0.7, country: 0.3 }]);

  const allZero = weightPanel({
    sliders: { age: 0, country: 0 },
    engineWeights: {},
    onRelease: (s) => sent.push(s),
    onSlide: () => {},
  });
  const zeroSlider = findAll(allZero, (n) => n.tag === "input")[0];
  zeroSlider.on?.change?.(new Event("change"));
  assert.equal(sent.length, 1); // nothing new sent
  const errors = findAll(allZero, (n) => n.attrs.class === "validation-error");
  assert.equal(errors.length, 1);
  assert.match(textOf(errors[0]), /above zero/);
});
