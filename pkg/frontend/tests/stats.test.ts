import { describe, expect, it } from "vitest";

import { median, quantile } from "../src/stats";

describe("median", () => {
  it("odd length", () => {
    expect(median([3, 1, 2])).toBe(2);
  });

  it("even length interpolates", () => {
    expect(median([4, 1, 3, 2])).toBe(2.5);
  });

  it("single value", () => {
    expect(median([7])).toBe(7);
  });

  it("does not mutate its input", () => {
    const data = [3, 1, 2];
    median(data);
    expect(data).toEqual([3, 1, 2]);
  });
});

describe("quantile", () => {
  it("endpoints are min and max", () => {
    expect(quantile([5, 1, 9], 0)).toBe(1);
    expect(quantile([5, 1, 9], 1)).toBe(9);
  });

  it("interpolates linearly", () => {
    expect(quantile([0, 10], 0.25)).toBe(2.5);
    expect(quantile([1, 2, 3, 4], 0.75)).toBeCloseTo(3.25, 12);
  });

  it("rejects empty samples and bad levels", () => {
    expect(() => quantile([], 0.5)).toThrow();
    expect(() => quantile([1], 1.5)).toThrow();
  });
});
