/** Baseline-vs-recommendation comparison arithmetic. Sign conventions:
 * higher penetration rate / cutter life and lower cost all report as
 * positive rates of change. All inputs are service-payload numbers. */

export interface ComparisonRow {
  metric: "pr" | "ef" | "cost";
  before: number;
  after: number;
  ratePct: number;
}

export function prRate(before: number, after: number): number {
  return ((after - before) / before) * 100;
}

export function efRate(before: number, after: number): number {
  return ((after - before) / before) * 100;
}

export function costRate(before: number, after: number): number {
  return ((before - after) / before) * 100;
}

export function comparisonRows(
  before: { pr: number; ef: number; cost: number },
  after: { pr: number; ef: number; cost: number },
): ComparisonRow[] {
  return [
    { metric: "pr", before: before.pr, after: after.pr, ratePct: prRate(before.pr, after.pr) },
    { metric: "ef", before: before.ef, after: after.ef, ratePct: efRate(before.ef, after.ef) },
    { metric: "cost", before: before.cost, after: after.cost, ratePct: costRate(before.cost, after.cost) },
  ];
}

/** Display rounding used everywhere in the console. */
export function round2(value: number): number {
  return Math.round(value * 100) / 100;
}

export function formatRate(ratePct: number): string {
  return `${round2(ratePct).toFixed(2)}%`;
}

export function isOnGrid(value: number, min: number, max: number, step: number): boolean {
  if (value < min || value > max) return false;
  const k = (value - min) / step;
  return Math.abs(k - Math.round(k)) < 1e-9;
}
