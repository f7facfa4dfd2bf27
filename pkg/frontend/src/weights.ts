/** Slider panel: one [0,1] slider per quasi-identifier, submitted on
 * release, plus read-only bars showing the engine's current normalized
 * weights (which drift under interactive updates). */

import { VNode, h } from "./vdom.js";

export interface WeightPanelModel {
  sliders: Record<string, number>;
  engineWeights: Record<string, number>;
  onRelease: (sliders: Record<string, number>) => void;
  onSlide: (attr: string, value: number) => void;
}

export function validateSliders(sliders: Record<string, number>): string | null {
  const values = Object.values(sliders);
  if (values.some((v) => v < 0 || v > 1 || Number.isNaN(v))) {
    return "sliders must stay within [0, 1]";
  }
  if (!values.some((v) => v > 0)) {
    return "at least one slider must be above zero";
  }
  return null;
}

export function weightPanel(model: WeightPanelModel): VNode {
  const names = Object.keys(model.sliders);
  const error = validateSliders(model.sliders);
  const maxEngine = Math.max(1e-12, ...Object.values(model.engineWeights));

  const rows = names.map((name) => {
    const slider = h(
      "input",
      {
        type: "range",
        min: "0",
        max: "1",
        step: "0.01",
        value: String(model.sliders[name]),
        "data-attr": name,
      },
      [],
      {
        input: (ev) =>
          model.onSlide(name, Number((ev.target as HTMLInputElement).value)),
        change: () => {
          if (validateSliders(model.sliders) === null) {
            model.onRelease({ ...model.sliders });
          }
        },
      },
    );
    const engine = model.engineWeights[name] ?? 0;
    return h("div", { class: "weight-row" }, [
      h("span", { class: "attr" }, [name]),
      slider,
      h("span", { class: "slider-value" }, [model.sliders[name].toFixed(2)]),
      h("div", { class: "engine-track", title: "engine weight (normalized)" }, [
        h("div", {
          class: "engine-fill",
          style: `width:${((100 * engine) / maxEngine).toFixed(2)}%`,
          "data-weight": engine.toFixed(6),
        }),
      ]),
    ]);
  });

  return h("div", { class: "weight-panel" }, [
    h("h3", {}, ["Attribute importance"]),
    ...rows,
    ...(error ? [h("div", { class: "validation-error" }, [error])] : []),
  ]);
}
