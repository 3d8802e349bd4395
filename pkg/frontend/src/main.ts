/** DOM wiring for the labeling workbench. */

import { Client } from "./api.js";
import { serializeDraft, validateDraft } from "./potential.js";
import {
  addIndices,
  lassoSelect,
  selectionsFromFragment,
  selectionsToFragment,
  type Point2,
  type Selection,
} from "./selection.js";
import {
  colorRamp,
  drawScatter,
  fitView,
  fromScreen,
  type ViewTransform,
} from "./scatter.js";
import {
  canSubmit,
  embedParams,
  initialState,
  submitAndWait,
  type SessionState,
} from "./session.js";
import { DEFAULT_SWEEP, runSweep } from "./sweep.js";
import { row } from "./types.js";

const PALETTE = ["#2a7fff", "#ff5a5a", "#2fb36b", "#b05ad6", "#e0a030"];

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function main(): void {
  const client = new Client(
    (window as unknown as { SEMAPS_API?: string }).SEMAPS_API ??
    "http://localhost:8008");
  let state: SessionState = initialState();
  let view: ViewTransform = { scale: 1, offsetX: 0, offsetY: 0 };
  let lasso: Point2[] = [];
  let lassoActive = false;
  let classLabels: number[] | null = null;

  const canvas = $("scatter") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("no 2d context");

  const status = $("status");
  const errorBox = $("error-readout");

  function currentPoints(): Point2[] {
    if (!state.embedding) return [];
    const [m, n] = state.embedding.shape;
    const pts: Point2[] = [];
    for (let i = 0; i < m; i++) {
      const r = row(state.embedding.coords, n, i);
      pts.push([r[0] ?? 0, r[1] ?? 0]);
    }
    return pts;
  }

  function pointColor(i: number): string {
    for (const sel of state.selections) {
      if (sel.indices.includes(i)) return sel.color;
    }
    if (classLabels) {
      const c = classLabels[i];
      if (c === -2) return "#111111"; // zero-class rendered distinctly
      if (c !== undefined && c >= 0) return PALETTE[c % PALETTE.length]!;
    }
    if (state.embedding && state.embedding.shape[1] > 2) {
      const [, n] = state.embedding.shape;
      const v = state.embedding.coords[i * n + 2] ?? 0;
      return colorRamp(v, -0.1, 0.1);
    }
    return "#4a6080";
  }

  function redraw(): void {
    const pts = currentPoints();
    view = fitView(pts, canvas.width, canvas.height);
    drawScatter(ctx!, pts, view, {
      pointColor,
      pointRadius: 3,
      background: "#10141c",
    }, lasso);
    status.textContent =
      `dataset=${state.datasetId ?? "-"} m=${state.m} job=${state.jobState}` +
      ` alpha=${state.alpha} delta=${state.delta.toExponential(2)}`;
    (window as unknown as { __state: SessionState }).__state = state;
  }

  function refreshControls(): void {
    ($("alpha-slider") as HTMLInputElement).value =
      String(Math.log10(Math.max(state.alpha, 1e-3)));
    $("alpha-value").textContent = state.alpha.toPrecision(3);
    $("draft-json").textContent = serializeDraft(state.draft) ?? "(none)";
    const problems = validateDraft(state.draft, state.m);
    $("draft-problems").textContent = problems.join("; ");
    ($("embed-btn") as HTMLButtonElement).disabled = !canSubmit(state);
    ($("sweep-btn") as HTMLButtonElement).disabled = !canSubmit(state);
  }

  async function loadDemo(): Promise<void> {
    const resp = await fetch("./test/fixtures/arc-points.json");
    const arc = await resp.json() as { points: number[]; shape: [number, number] };
    const meta = await client.postDataset(arc.points, arc.shape);
    state = { ...initialState(), datasetId: meta.id, m: meta.m,
              sigma: 1.0, k: 10, n: 2 };
    await embed();
    const fragment = window.location.hash.slice(1);
    if (fragment) {
      try {
        state.selections = selectionsFromFragment(fragment);
      } catch {
        // a stale fragment never blocks the session
      }
    }
    refreshControls();
    redraw();
  }

  async function embed(): Promise<void> {
    setBusy(true);
    state = await submitAndWait(client, state);
    setBusy(false);
    errorBox.textContent = state.lastError ?? "";
    classLabels = null;
    refreshControls();
    redraw();
  }

  function setBusy(busy: boolean): void {
    for (const id of ["embed-btn", "sweep-btn", "alpha-slider",
                      "delta-slider"]) {
      ($(id) as HTMLInputElement | HTMLButtonElement).disabled = busy;
    }
  }

  async function tuneThreshold(): Promise<void> {
    if (!state.currentJob || state.jobState !== "done") return;
    const groups: Record<string, number[]> = {};
    for (const sel of state.selections) {
      if (sel.indices.length > 0) groups[sel.name] = sel.indices;
    }
    if (Object.keys(groups).length === 0) return;
    const out = await client.classify(state.currentJob, {
      fit_groups: groups,
      norm_threshold: state.delta,
    });
    classLabels = out.labels;
    $("class-legend").textContent = Object.entries(out.counts)
      .map(([k, v]) => `${k}: ${v}`).join("   ");
    if (out.error_rate !== undefined) {
      errorBox.textContent = `error rate ${(100 * out.error_rate).toFixed(1)}%`;
    }
    redraw();
  }

  // --- event wiring ---

  $("demo-btn").addEventListener("click", () => { void loadDemo(); });
  $("embed-btn").addEventListener("click", () => { void embed(); });

  $("sweep-btn").addEventListener("click", () => {
    if (!state.datasetId) return;
    setBusy(true);
    void runSweep(client, state.datasetId, embedParams(state), DEFAULT_SWEEP,
      (frame) => {
        state = { ...state, embedding: frame.embedding, alpha: frame.alpha,
                  jobState: "done" };
        refreshControls();
        redraw();
      }).catch((err) => {
        errorBox.textContent = String(err);
      }).finally(() => setBusy(false));
  });

  ($("alpha-slider") as HTMLInputElement).addEventListener("input", (ev) => {
    const exp = Number((ev.target as HTMLInputElement).value);
    state = { ...state, alpha: Number((10 ** exp).toPrecision(3)) };
    refreshControls();
  });

  ($("delta-slider") as HTMLInputElement).addEventListener("input", (ev) => {
    const t = Number((ev.target as HTMLInputElement).value);
    state = { ...state, delta: t <= 0 ? 0 : Number((10 ** (t * 6 - 6)).toPrecision(3)) };
    void tuneThreshold();
    redraw();
  });

  $("add-selection-btn").addEventListener("click", () => {
    const name = prompt("selection name?", `group${state.selections.length}`);
    if (!name) return;
    const sel: Selection = {
      name,
      color: PALETTE[state.selections.length % PALETTE.length]!,
      indices: [],
    };
    state = { ...state, selections: [...state.selections, sel] };
    refreshControls();
  });

  $("to-diag-btn").addEventListener("click", () => {
    const active = state.selections[state.selections.length - 1];
    if (!active) return;
    state = {
      ...state,
      draft: {
        ...state.draft,
        diag: [...state.draft.diag, { indices: active.indices, value: 1.0 }],
      },
    };
    refreshControls();
  });

  $("to-pair-btn").addEventListener("click", () => {
    const [a, b] = state.selections.slice(-2);
    if (!a || !b || a.indices.length === 0 || b.indices.length === 0) return;
    state = {
      ...state,
      draft: {
        ...state.draft,
        pairs: [...state.draft.pairs, [a.indices[0]!, b.indices[0]!]],
      },
    };
    refreshControls();
  });

  $("clear-draft-btn").addEventListener("click", () => {
    state = { ...state, draft: { diag: [], pairs: [], chains: [] } };
    refreshControls();
  });

  canvas.addEventListener("mousedown", (ev) => {
    lassoActive = true;
    lasso = [[ev.offsetX, ev.offsetY]];
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (!lassoActive) return;
    lasso.push([ev.offsetX, ev.offsetY]);
    redraw();
  });
  canvas.addEventListener("mouseup", () => {
    lassoActive = false;
    if (lasso.length >= 3 && state.selections.length > 0) {
      const dataLasso = lasso.map((p) => fromScreen(p, view));
      const caught = lassoSelect(currentPoints(), dataLasso);
      const last = state.selections.length - 1;
      const updated = addIndices(state.selections[last]!, caught);
      const selections = [...state.selections];
      selections[last] = updated;
      state = { ...state, selections };
      window.location.hash = selectionsToFragment(selections);
    }
    lasso = [];
    refreshControls();
    redraw();
  });

  refreshControls();
  redraw();
}

main();
