/** The cluster board: the open cluster's members and generalization, plus
 * one card per candidate with unweighted per-attribute cost bars. Cards
 * disable while a mutation is in flight or the proposal is stale. */

import type { RoundProposal } from "./protocol.js";
import { VNode, h } from "./vdom.js";

export interface BoardOptions {
  disabled: boolean;
  onChoice: (record: number) => void;
}

export function clusterBoardView(proposal: RoundProposal, opts: BoardOptions): VNode {
  const qiNames = Object.keys(proposal.cluster.generalization);
  const maxCost = Math.max(
    1e-12,
    ...proposal.candidates.flatMap((c) => qiNames.map((q) => c.costs[q] ?? 0)),
  );

  const clusterPanel = h("div", { class: "cluster-summary" }, [
    h("h3", {}, [`Open cluster (${proposal.cluster.members.length} records)`]),
    h("div", { class: "members" }, [`members: ${proposal.cluster.members.join(", ")}`]),
    h(
      "table",
      { class: "generalization" },
      qiNames.map((q) =>
        h("tr", {}, [
          h("td", { class: "attr" }, [q]),
          h("td", { class: "gen-value" }, [proposal.cluster.generalization[q]]),
        ]),
      ),
    ),
    h("div", { class: "cluster-gil" }, [
      `current weighted GIL: ${proposal.cluster.weighted_gil.toFixed(4)}`,
    ]),
  ]);

  const cards = proposal.candidates.map((cand, idx) => {
    const isPick = idx === proposal.engine_pick;
    const classes = ["candidate-card"];
    if (isPick) classes.push("engine-pick");
    if (opts.disabled) classes.push("disabled");
    const bars = qiNames.map((q) => {
      const cost = cand.costs[q] ?? 0;
      const width = (100 * cost) / maxCost;
      return h("div", { class: "cost-row" }, [
        h("span", { class: "attr" }, [q]),
        h("div", { class: "bar-track" }, [
          h("div", {
            class: "bar-fill",
            style: `width:${width.toFixed(2)}%`,
            "data-cost": String(cost),
          }),
        ]),
        h("span", { class: "value" }, [String(cand.values[q])]),
      ]);
    });
    return h(
      "div",
      {
        class: classes.join(" "),
        "data-record": String(cand.record),
        ...(opts.disabled ? { "data-hint": "busy; retry after the next frame" } : {}),
      },
      [
        h("div", { class: "card-head" }, [
          `record ${cand.record}`,
          ...(isPick ? [h("span", { class: "badge" }, ["engine pick"])] : []),
          h("span", { class: "delta" }, [`Δ ${cand.weighted_delta.toFixed(4)}`]),
        ]),
        ...bars,
      ],
      opts.disabled ? {} : { click: () => opts.onChoice(cand.record) },
    );
  });

  return h("div", { class: "cluster-board" }, [
    clusterPanel,
    h("div", { class: "candidates" }, cards),
  ]);
}
