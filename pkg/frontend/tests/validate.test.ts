import { describe, expect, it } from "vitest";

import { ROCK_FIELDS, validateBaseline, validateCostOverrides, validateRock } from "../src/validate.js";

const defaults = Object.fromEntries(ROCK_FIELDS.map((f) => [f.key, f.default]));

describe("scenario form validation", () => {
  it("accepts the prefilled field averages", () => {
    expect(validateRock(defaults)).toEqual([]);
  });

  it("blocks an invalid muck geometry type", () => {
    const issues = validateRock({ ...defaults, mgt: 5 });
    expect(issues.some((i) => i.field === "mgt")).toBe(true);
    expect(validateRock({ ...defaults, mgt: 2.5 }).some((i) => i.field === "mgt")).toBe(true);
  });

  it("blocks out-of-range and missing values", () => {
    expect(validateRock({ ...defaults, rqd: 101 }).some((i) => i.field === "rqd")).toBe(true);
    expect(validateRock({ ...defaults, ucs: 0 }).some((i) => i.field === "ucs")).toBe(true);
    const { src, ...missing } = defaults;
    expect(validateRock(missing).some((i) => i.field === "src")).toBe(true);
  });

  it("treats the baseline as optional but validates it when given", () => {
    expect(validateBaseline(undefined, undefined)).toEqual([]);
    expect(validateBaseline(6183.67, 749.67)).toEqual([]);
    expect(validateBaseline(6183.67, undefined).length).toBe(1);
    expect(validateBaseline(-1, 749.67).length).toBe(1);
  });

  it("validates only the touched cost overrides", () => {
    expect(validateCostOverrides({ c1: undefined, c2: 400000 })).toEqual([]);
    expect(validateCostOverrides({ c1: -5 }).some((i) => i.field === "c1")).toBe(true);
  });
});
