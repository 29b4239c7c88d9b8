/** Pure builders for the recommendation panel, the what-if detail panel
 * and the baseline comparison strip. They turn service payloads into
 * flat label/value lists; the DOM layer only prints them. */

import { comparisonRows, formatRate, round2 } from "./rates.js";
import type { BaselineEvaluation, Recommendation } from "./types.js";
import type { CellReadout } from "./view.js";

export interface PanelLine {
  label: string;
  value: string;
}

const fmt = (v: number | null, unit: string, digits = 2): string =>
  v === null ? "–" : `${v.toFixed(digits)} ${unit}`;

export function recommendationPanel(rec: Recommendation): PanelLine[] {
  return [
    { label: "Thrust", value: fmt(rec.th, "kN", 0) },
    { label: "Torque", value: fmt(rec.tor, "kN·m", 0) },
    { label: "Penetration rate", value: fmt(rec.pr, "mm/min") },
    { label: "Cutter life", value: fmt(rec.ef, "m³/mm") },
    { label: "Cost", value: fmt(rec.cost, "RMB/m") },
    { label: "· cutter share", value: fmt(rec.cutter_cost, "RMB/m") },
    { label: "· schedule share", value: fmt(rec.period_cost, "RMB/m") },
    { label: "Feasible grid share", value: `${round2(rec.feasible_fraction * 100).toFixed(1)}%` },
  ];
}

export function whatIfPanel(readout: CellReadout): PanelLine[] {
  const lines: PanelLine[] = [
    { label: "Thrust", value: fmt(readout.th, "kN", 0) },
    { label: "Torque", value: fmt(readout.tor, "kN·m", 0) },
    { label: "Penetration rate", value: fmt(readout.pr, "mm/min") },
    { label: "Cutter life", value: fmt(readout.ef, "m³/mm") },
    { label: "Cost", value: readout.feasible ? fmt(readout.cost, "RMB/m") : "infeasible" },
  ];
  if (readout.feasible) {
    lines.push({
      label: "vs optimum",
      value: readout.isOptimum ? "+0.00 RMB/m (optimum)"
        : `+${(readout.deltaCost as number).toFixed(2)} RMB/m`,
    });
  }
  return lines;
}

export interface ComparisonStripRow {
  metric: string;
  before: string;
  after: string;
  rate: string;
}

export function comparisonStrip(
  baseline: BaselineEvaluation,
  rec: Recommendation,
): ComparisonStripRow[] | null {
  if (baseline.cost === null || baseline.pr <= 0 || baseline.ef <= 0) return null;
  const rows = comparisonRows(
    { pr: baseline.pr, ef: baseline.ef, cost: baseline.cost.total },
    { pr: rec.pr, ef: rec.ef, cost: rec.cost },
  );
  const names = { pr: "PR (mm/min)", ef: "Ef (m³/mm)", cost: "Cost (RMB/m)" };
  return rows.map((row) => ({
    metric: names[row.metric],
    before: row.before.toFixed(2),
    after: row.after.toFixed(2),
    rate: formatRate(row.ratePct),
  }));
}
