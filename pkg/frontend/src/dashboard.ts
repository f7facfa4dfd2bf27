/** Live metrics: normalized information-loss gauge, equivalence-class size
 * histogram, records-remaining counter. Rendered purely from the highest
 * sequence metrics frame. */

import type { SessionMetrics } from "./protocol.js";
import { VNode, h } from "./vdom.js";

export interface DashboardModel {
  metrics: SessionMetrics | null;
  metricsSeq: number;
  connection: string;
}

export function metricsDashboard(model: DashboardModel): VNode {
  if (!model.metrics) {
    return h("div", { class: "dashboard empty" }, ["waiting for metrics…"]);
  }
  const m = model.metrics;
  const gil = m.gil.normalized_partial;
  const gauge = h("div", { class: "gil-gauge" }, [
    h("h3", {}, ["Information loss"]),
    h("div", { class: "gauge-track" }, [
      h("div", {
        class: "gauge-fill",
        style: `width:${(100 * gil).toFixed(2)}%`,
        "data-gil": String(gil),
      }),
    ]),
    h("div", { class: "gauge-label" }, [`${(100 * gil).toFixed(2)}% of maximum`]),
  ]);

  const sizes = Object.entries(m.class_histogram)
    .map(([size, count]) => [Number(size), count] as const)
    .sort((a, b) => a[0] - b[0]);
  const maxCount = Math.max(1, ...sizes.map(([, c]) => c));
  const histogram = h("div", { class: "class-histogram" }, [
    h("h3", {}, ["Equivalence classes"]),
    ...(sizes.length === 0
      ? [h("div", { class: "empty" }, ["none yet"])]
      : sizes.map(([size, count]) =>
          h("div", { class: "hist-row", "data-size": String(size) }, [
            h("span", { class: "size" }, [`size ${size}`]),
            h("div", { class: "hist-track" }, [
              h("div", {
                class: "hist-fill",
                style: `width:${((100 * count) / maxCount).toFixed(2)}%`,
              }),
            ]),
            h("span", { class: "count" }, [String(count)]),
          ]),
        )),
  ]);

  return h("div", { class: "dashboard", "data-seq": String(model.metricsSeq) }, [
    gauge,
    histogram,
    h("div", { class: "counters" }, [
      h("span", { class: "remaining" }, [`${m.records_remaining} records remaining`]),
      h("span", { class: "assigned" }, [`${m.records_assigned} assigned`]),
      h("span", { class: "phase" }, [`phase: ${m.phase}`]),
    ]),
    ...(model.connection !== "open"
      ? [h("div", { class: "banner reconnect" }, ["connection lost — reconnecting…"])]
      : []),
  ]);
}
