/** Utility-vs-k chart for sweep outputs: one series per weight regime,
 * k=0 (the original dataset) leftmost, selectable metric. */

import type { SweepPlot, SweepPoint } from "./protocol.js";
import { VNode, h } from "./vdom.js";

export type MetricKey = "accuracy" | "macro_f1";

export interface SweepChartModel {
  plot: SweepPlot;
  metric: MetricKey;
  hiddenRegimes: Set<string>;
  onMetric: (m: MetricKey) => void;
  onToggle: (regime: string) => void;
}

const WIDTH = 640;
const HEIGHT = 320;
const PAD = 40;
const COLORS = ["#3366cc", "#dc3912", "#ff9900", "#109618", "#990099"];

export function sweepChartView(model: SweepChartModel): VNode {
  const regimes = Object.keys(model.plot.series).sort();
  const visible = regimes.filter((r) => !model.hiddenRegimes.has(r));
  const allPoints = visible.flatMap((r) => model.plot.series[r]);
  const ks = [...new Set(allPoints.map((p) => p.k))].sort((a, b) => a - b);
  const values = allPoints.map((p) => p[model.metric]);
  const vMin = Math.min(0, ...values);
  const vMax = Math.max(1e-9, ...values);

  const x = (k: number) => {
    const idx = ks.indexOf(k);
    return PAD + (idx * (WIDTH - 2 * PAD)) / Math.max(1, ks.length - 1);
  };
  const y = (v: number) =>
    HEIGHT - PAD - ((v - vMin) * (HEIGHT - 2 * PAD)) / (vMax - vMin || 1);

  const seriesNodes = visible.flatMap((regime, i) => {
    const pts = [...model.plot.series[regime]].sort((a, b) => a.k - b.k);
    const color = COLORS[regimes.indexOf(regime) % COLORS.length];
    const line = h("polyline", {
      class: `series series-${regime}`,
      points: pts.map((p) => `${x(p.k)},${y(p[model.metric])}`).join(" "),
      fill: "none",
      stroke: color,
      "stroke-width": "2",
    });
    const markers = pts.map((p: SweepPoint) =>
      h(
        "circle",
        {
          class: "marker",
          "data-regime": regime,
          "data-k": String(p.k),
          cx: String(x(p.k)),
          cy: String(y(p[model.metric])),
          r: "4",
          fill: color,
        },
        [
          h("title", {}, [
            `k=${p.k} ${regime}: ${model.metric}=${p[model.metric].toFixed(4)}`,
          ]),
        ],
      ),
    );
    return [line, ...markers];
  });

  const axis = [
    h("line", {
      x1: String(PAD), y1: String(HEIGHT - PAD),
      x2: String(WIDTH - PAD), y2: String(HEIGHT - PAD),
      stroke: "#444",
    }),
    ...ks.map((k) =>
      h("text", {
        x: String(x(k)), y: String(HEIGHT - PAD + 16),
        "text-anchor": "middle", class: "tick",
      }, [k === 0 ? "orig" : String(k)]),
    ),
  ];

  const toggles = regimes.map((regime) =>
    h(
      "label",
      { class: "regime-toggle", "data-regime": regime },
      [
        h("input", {
          type: "checkbox",
          ...(model.hiddenRegimes.has(regime) ? {} : { checked: "checked" }),
        }, [], { change: () => model.onToggle(regime) }),
        regime,
      ],
    ),
  );

  const metricButtons = (["accuracy", "macro_f1"] as MetricKey[]).map((mk) =>
    h(
      "button",
      { class: model.metric === mk ? "metric active" : "metric" },
      [mk],
      { click: () => model.onMetric(mk) },
    ),
  );

  return h("div", { class: "sweep-chart", "data-target": model.plot.target }, [
    h("h3", {}, [`Utility vs k — target: ${model.plot.target}`]),
    h("div", { class: "controls" }, [...metricButtons, ...toggles]),
    h("svg", {
      viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
      width: String(WIDTH),
      height: String(HEIGHT),
    }, [...axis, ...seriesNodes]),
  ]);
}

export function sweepErrorView(message: string): VNode {
  return h("div", { class: "sweep-chart error-panel" }, [
    h("h3", {}, ["Sweep results"]),
    h("div", { class: "error" }, [`cannot render plot: ${message}`]),
  ]);
}
