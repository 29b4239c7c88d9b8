/** Client-side validation of the scenario form: mirrors the service's
 * domain rules so submission is blocked before any request is made. */

import type { RockState } from "./types.js";

export interface FieldSpec {
  key: keyof RockState;
  label: string;
  unit: string;
  min: number;
  max: number;
  integer: boolean;
  default: number;
}

/** The eight rock-side inputs; defaults prefilled from the averaged
 * rock parameters measured over the verification section. */
export const ROCK_FIELDS: FieldSpec[] = [
  { key: "src", label: "Surrounding rock class", unit: "II–V as 2–5", min: 2, max: 5, integer: true, default: 3 },
  { key: "ucs", label: "Uniaxial compressive strength", unit: "MPa", min: 1e-9, max: 500, integer: false, default: 78.43 },
  { key: "rqd", label: "Rock quality designation", unit: "%", min: 0, max: 100, integer: false, default: 35.17 },
  { key: "cai", label: "Cerchar abrasivity index", unit: "–", min: 1e-9, max: 7, integer: false, default: 3.28 },
  { key: "q", label: "Quartz content", unit: "%", min: 0, max: 100, integer: false, default: 75.14 },
  { key: "ci", label: "Coarseness index", unit: "–", min: 0, max: 600, integer: false, default: 432.92 },
  { key: "m", label: "Mean grain size", unit: "mm", min: 1e-9, max: 100, integer: false, default: 12.69 },
  { key: "mgt", label: "Muck geometry type", unit: "1–4", min: 1, max: 4, integer: true, default: 2 },
];

export interface ValidationIssue {
  field: string;
  message: string;
}

export function validateRock(values: Partial<Record<keyof RockState, number>>): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  for (const spec of ROCK_FIELDS) {
    const value = values[spec.key];
    if (value === undefined || Number.isNaN(value)) {
      issues.push({ field: spec.key, message: `${spec.label} is required` });
      continue;
    }
    if (spec.integer && !Number.isInteger(value)) {
      issues.push({ field: spec.key, message: `${spec.label} must be an integer` });
      continue;
    }
    if (value < spec.min || value > spec.max) {
      issues.push({
        field: spec.key,
        message: `${spec.label} must be in [${spec.min <= 1e-9 ? "0" : spec.min}, ${spec.max}] ${spec.unit}`,
      });
    }
  }
  return issues;
}

export function validateBaseline(th?: number, tor?: number): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  const given = (v?: number) => v !== undefined && !Number.isNaN(v);
  if (!given(th) && !given(tor)) return issues; // baseline is optional
  if (!given(th) || (th as number) <= 0) {
    issues.push({ field: "baseline_th", message: "baseline thrust must be > 0 kN" });
  }
  if (!given(tor) || (tor as number) <= 0) {
    issues.push({ field: "baseline_tor", message: "baseline torque must be > 0 kN·m" });
  }
  return issues;
}

export function validateCostOverrides(values: Record<string, number | undefined>): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  for (const [key, value] of Object.entries(values)) {
    if (value === undefined || Number.isNaN(value)) continue; // untouched = default
    if (value <= 0) {
      issues.push({ field: key, message: `${key} must be > 0` });
    }
  }
  return issues;
}
