/** Browser bootstrap: wires the setup form, the live session cockpit
 * (board + sliders + dashboard), and the sweep chart tab to the server. */

import { ApiClient, SessionStream, streamUrl } from "./client.js";
import { clusterBoardView } from "./board.js";
import { weightPanel, validateSliders } from "./weights.js";
import { metricsDashboard } from "./dashboard.js";
import { sweepChartView, sweepErrorView, MetricKey } from "./sweepchart.js";
import { SessionStore, parseSweepPlot } from "./state.js";
import { h, replaceChildren, VNode } from "./vdom.js";

const store = new SessionStore();
let api: ApiClient | null = null;
let stream: SessionStream | null = null;
let sliders: Record<string, number> = {};
let metric: MetricKey = "accuracy";
const hiddenRegimes = new Set<string>();

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

async function readFile(input: HTMLInputElement): Promise<string> {
  const file = input.files?.[0];
  if (!file) throw new Error(`choose a file for #${input.id}`);
  return file.text();
}

async function createSession(): Promise<void> {
  const base = ($("server-url") as HTMLInputElement).value.replace(/\/$/, "");
  api = new ApiClient(base);
  const csv = await readFile($("dataset-file") as HTMLInputElement);
  const treeFiles = ($("tree-files") as HTMLInputElement).files ?? new FileList();
  const trees: Record<string, unknown> = {};
  for (const f of Array.from(treeFiles as unknown as File[])) {
    trees[f.name.replace(/\.json$/, "")] = JSON.parse(await f.text());
  }
  const k = Number(($("k-input") as HTMLInputElement).value);
  const m = Number(($("m-input") as HTMLInputElement).value);
  const n = Number(($("rows-input") as HTMLInputElement).value);

  const ds = await api.uploadDataset({
    csv,
    adult: ($("adult-check") as HTMLInputElement).checked,
    complete_only: true,
    ...(n > 0 ? { sample: { n, seed: 0 } } : {}),
  });
  const hs = await api.uploadHierarchies(trees);
  const session = await api.createSession({
    dataset: ds.id,
    hierarchies: hs.id,
    k,
    m,
    weights: "equal",
  });
  store.setSession(session.id);
  sliders = {};
  store.setConnection("connecting");
  stream?.close();
  stream = new SessionStream(streamUrl(base, session.id), {
    onFrame: (f) => store.applyFrame(f),
    onOpen: () => store.setConnection("open"),
    onClose: (retrying) => store.setConnection(retrying ? "connecting" : "closed"),
  });
  stream.connect();
}

function sendChoice(record: number): void {
  if (!stream || store.state.busy) return;
  store.setBusy(true);
  stream.send({ type: "choice", record });
}

function sendSliders(values: Record<string, number>): void {
  if (!stream || validateSliders(values) !== null) return;
  store.setBusy(true);
  stream.send({ type: "set_weights", sliders: values });
}

function render(): void {
  const s = store.state;
  const root = $("app");

  const qiNames = s.proposal ? Object.keys(s.proposal.cluster.generalization) : [];
  for (const q of qiNames) {
    if (!(q in sliders)) sliders[q] = 0.5;
  }

  const left: VNode = s.proposal
    ? clusterBoardView(s.proposal, {
        disabled: s.busy || s.metrics?.phase === "complete",
        onChoice: sendChoice,
      })
    : h("div", { class: "cluster-board empty" }, [
        s.sessionId ? "waiting for the first round…" : "create a session to begin",
      ]);

  const panel = weightPanel({
    sliders,
    engineWeights: s.metrics?.weights ?? {},
    onSlide: (attr, value) => {
      sliders[attr] = value;
      render();
    },
    onRelease: sendSliders,
  });

  const dash = metricsDashboard({
    metrics: s.metrics,
    metricsSeq: s.metricsSeq,
    connection: s.connection,
  });

  const sweep = s.sweep
    ? sweepChartView({
        plot: s.sweep,
        metric,
        hiddenRegimes,
        onMetric: (mk) => {
          metric = mk;
          render();
        },
        onToggle: (regime) => {
          if (hiddenRegimes.has(regime)) hiddenRegimes.delete(regime);
          else hiddenRegimes.add(regime);
          render();
        },
      })
    : s.lastError && !s.sessionId
      ? sweepErrorView(s.lastError)
      : h("div", { class: "sweep-chart empty" }, ["load a plots/<target>.json file"]);

  const error = s.lastError
    ? [h("div", { class: "banner error" }, [s.lastError])]
    : [];

  replaceChildren(
    root,
    h("div", { class: "workbench" }, [
      ...error,
      h("div", { class: "session-row" }, [left, panel, dash]),
      sweep,
    ]),
    document,
  );
}

function wireStaticControls(): void {
  $("create-btn").addEventListener("click", () => {
    createSession().catch((err) => {
      store.setSweep(store.state.sweep, String(err?.message ?? err));
    });
  });
  $("autopilot-btn").addEventListener("click", () => {
    if (stream) {
      store.setBusy(true);
      stream.send({ type: "autopilot" });
    }
  });
  $("export-btn").addEventListener("click", async () => {
    if (!api || !store.state.sessionId) return;
    const text = await api.exportOf(store.state.sessionId);
    const blob = new Blob([text], { type: "text/csv" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = `anonymized-${store.state.sessionId}.csv`;
    a.click();
  });
  ($("plot-file") as HTMLInputElement).addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    try {
      const plot = parseSweepPlot(JSON.parse(await readFile(input)));
      store.setSweep(plot);
    } catch (err) {
      store.setSweep(null, String((err as Error).message ?? err));
    }
  });
}

store.subscribe(render);
wireStaticControls();
render();
