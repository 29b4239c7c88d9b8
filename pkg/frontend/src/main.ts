/** DOM wiring of the operator console: scenario form -> service calls ->
 * heatmap + panels. At most one surface request is in flight; a new
 * submit aborts the previous one and stale data is never shown. */

import { ApiClient, ServiceUnavailableError, ServiceValidationError } from "./api.js";
import { cellAt, drawHeatmap, layoutFor } from "./heatmap.js";
import { comparisonStrip, recommendationPanel, whatIfPanel } from "./panel.js";
import type { PanelLine } from "./panel.js";
import type { CostOverrides, RecommendResponse, RockState } from "./types.js";
import { ROCK_FIELDS, validateBaseline, validateCostOverrides, validateRock } from "./validate.js";
import { SurfaceView } from "./view.js";

const api = new ApiClient((window as { TBM_API_BASE?: string }).TBM_API_BASE ?? "");

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

const COST_KEYS = ["c1", "c2", "d_tbm", "w_max", "t_daily", "l"] as const;

let view: SurfaceView | null = null;
let lastResponse: RecommendResponse | null = null;
let inFlight: AbortController | null = null;

function buildForm(): void {
  const grid = el<HTMLDivElement>("rock-fields");
  for (const spec of ROCK_FIELDS) {
    const wrap = document.createElement("label");
    wrap.className = "field";
    wrap.innerHTML = `<span>${spec.label} <em>(${spec.unit})</em></span>` +
      `<input id="rock-${spec.key}" type="number" step="any" value="${spec.default}">` +
      `<small class="error" id="err-${spec.key}"></small>`;
    grid.appendChild(wrap);
  }
}

function readRock(): Partial<Record<keyof RockState, number>> {
  const values: Partial<Record<keyof RockState, number>> = {};
  for (const spec of ROCK_FIELDS) {
    const raw = el<HTMLInputElement>(`rock-${spec.key}`).value.trim();
    if (raw !== "") values[spec.key] = Number(raw);
  }
  return values;
}

function readCostOverrides(): CostOverrides | undefined {
  if (!el<HTMLInputElement>("advanced-toggle").checked) return undefined;
  const overrides: Record<string, number> = {};
  for (const key of COST_KEYS) {
    const raw = el<HTMLInputElement>(`cost-${key}`).value.trim();
    if (raw !== "") overrides[key] = Number(raw);
  }
  return Object.keys(overrides).length ? overrides : undefined;
}

function readBaseline(): { th: number; tor: number } | null {
  const th = el<HTMLInputElement>("baseline-th").value.trim();
  const tor = el<HTMLInputElement>("baseline-tor").value.trim();
  if (th === "" && tor === "") return null;
  return { th: Number(th), tor: Number(tor) };
}

function clearErrors(): void {
  document.querySelectorAll(".error").forEach((node) => (node.textContent = ""));
  el("banner").hidden = true;
}

function showFieldErrors(issues: { field: string; message: string }[]): void {
  for (const issue of issues) {
    const slot = document.getElementById(`err-${issue.field.replace(/^rock\./, "")}`);
    if (slot) slot.textContent = issue.message;
    else showBanner(`${issue.field}: ${issue.message}`, false);
  }
}

function showBanner(message: string, retryable: boolean): void {
  const banner = el("banner");
  banner.hidden = false;
  el("banner-text").textContent = message;
  el("banner-retry").hidden = !retryable;
}

function refreshSubmitState(): void {
  const issues = [
    ...validateRock(readRock()),
    ...validateBaseline(
      el<HTMLInputElement>("baseline-th").value.trim() === "" ? undefined
        : Number(el<HTMLInputElement>("baseline-th").value),
      el<HTMLInputElement>("baseline-tor").value.trim() === "" ? undefined
        : Number(el<HTMLInputElement>("baseline-tor").value)),
  ];
  el<HTMLButtonElement>("submit").disabled = issues.length > 0;
}

function renderPanel(target: string, lines: PanelLine[]): void {
  el(target).innerHTML = lines
    .map((line) => `<div class="row"><span>${line.label}</span><b>${line.value}</b></div>`)
    .join("");
}

function renderAll(): void {
  if (!view || !lastResponse) return;
  const canvas = el<HTMLCanvasElement>("heatmap");
  const layout = layoutFor(view.payload);
  canvas.width = layout.width;
  canvas.height = layout.height;
  const ctx = canvas.getContext("2d");
  if (ctx) drawHeatmap(ctx, view.payload, view.selected, view.baseline, layout);
  renderPanel("recommendation", recommendationPanel(lastResponse.recommendation));
  renderPanel("what-if", whatIfPanel(view.readout(view.selected)));
  renderComparison();
}

function renderComparison(): void {
  const host = el("comparison");
  const baseline = lastResponse?.baseline ?? null;
  if (!lastResponse || !baseline) {
    host.innerHTML = "";
    return;
  }
  const rows = comparisonStrip(baseline, lastResponse.recommendation);
  const flag = baseline.on_grid ? "" : ` <span class="offgrid">off-grid</span>`;
  if (!rows) {
    host.innerHTML = `<p>baseline is infeasible${flag}</p>`;
    return;
  }
  host.innerHTML =
    `<h3>Operator baseline ${baseline.th.toFixed(2)} kN / ${baseline.tor.toFixed(2)} kN·m${flag}</h3>` +
    `<table><tr><th></th><th>Before</th><th>After</th><th>Rate of change</th></tr>` +
    rows.map((r) => `<tr><td>${r.metric}</td><td>${r.before}</td><td>${r.after}</td>` +
                    `<td>${r.rate}</td></tr>`).join("") +
    `</table>`;
}

async function submit(): Promise<void> {
  clearErrors();
  const rockValues = readRock();
  const issues = validateRock(rockValues);
  if (issues.length) {
    showFieldErrors(issues);
    return;
  }
  const cost = readCostOverrides();
  const costIssues = validateCostOverrides({ ...(cost ?? {}) });
  if (costIssues.length) {
    showFieldErrors(costIssues);
    return;
  }
  const baseline = readBaseline();
  inFlight?.abort();
  const controller = new AbortController();
  inFlight = controller;
  el("status").textContent = "computing…";
  try {
    const rock = rockValues as unknown as RockState;
    const [surfacePayload, recommendResponse] = await Promise.all([
      api.surface(rock, cost, undefined, controller.signal),
      api.recommend(rock, cost, undefined, baseline, controller.signal),
    ]);
    if (controller.signal.aborted) return;
    view = new SurfaceView(surfacePayload);
    lastResponse = recommendResponse;
    if (recommendResponse.baseline) {
      view.baseline = view.cellFor(recommendResponse.baseline.th,
                                   recommendResponse.baseline.tor);
    }
    renderAll();
    el("status").textContent = "";
  } catch (err) {
    if (controller.signal.aborted) return;
    el("status").textContent = "";
    if (err instanceof ServiceValidationError) {
      showFieldErrors(err.body.errors ?? []);
      if (err.body.code === "no_feasible_point") {
        showBanner("No feasible grid point for this scenario "
          + `(feasible fraction ${err.body.feasible_fraction ?? 0})`, false);
      }
    } else if (err instanceof ServiceUnavailableError) {
      showBanner("Service unavailable — check that the decision service is running.", true);
    } else {
      showBanner(String(err), false);
    }
  } finally {
    if (inFlight === controller) inFlight = null;
  }
}

function wireEvents(): void {
  el("submit").addEventListener("click", () => void submit());
  el("banner-retry").addEventListener("click", () => void submit());
  el("advanced-toggle").addEventListener("change", () => {
    el("advanced").hidden = !el<HTMLInputElement>("advanced-toggle").checked;
  });
  document.querySelectorAll("input").forEach((node) =>
    node.addEventListener("input", refreshSubmitState));
  const canvas = el<HTMLCanvasElement>("heatmap");
  canvas.addEventListener("click", (event) => {
    if (!view) return;
    const rect = canvas.getBoundingClientRect();
    const layout = layoutFor(view.payload);
    view.select(cellAt(layout, event.clientX - rect.left, event.clientY - rect.top));
    renderAll();
  });
  document.addEventListener("keydown", (event) => {
    if (!view) return;
    if (["ArrowUp", "ArrowDown", "ArrowLeft", "ArrowRight"].includes(event.key)) {
      event.preventDefault();
      view.moveSelection(event.key);
      renderAll();
    }
  });
}

buildForm();
wireEvents();
refreshSubmitState();
