import { describe, expect, it } from "vitest";

import { median, quantile } from "../src/stats.js";

describe("quantile", () => {
  it("interpolates linearly between order statistics", () => {
    // h = (n-1) q / 100; for [1,2,3,4] and q=25, h=0.75 -> 1.75
    expect(quantile([1, 2, 3, 4], 25)).toBeCloseTo(1.75, 12);
    expect(quantile([1, 2, 3, 4], 75)).toBeCloseTo(3.25, 12);
    expect(quantile([1, 2, 3, 4], 50)).toBeCloseTo(2.5, 12);
  });

  it("hits min and max at the extremes", () => {
    expect(quantile([7.5, 2.25], 0)).toBe(2.25);
    expect(quantile([7.5, 2.25], 100)).toBe(7.5);
  });

  it("does not care about input order", () => {
    expect(quantile([9, 1, 5], 50)).toBe(5);
    expect(quantile([5, 9, 1], 50)).toBe(5);
  });

  it("handles a single sample", () => {
    expect(quantile([3.2], 0)).toBe(3.2);
    expect(quantile([3.2], 50)).toBe(3.2);
    expect(quantile([3.2], 100)).toBe(3.2);
  });

  it("rejects empty input and bad q", () => {
    expect(() => quantile([], 50)).toThrow(/empty/);
    expect(() => quantile([1], -1)).toThrow(/outside/);
    expect(() => quantile([1], 101)).toThrow(/outside/);
  });
});

describe("median", () => {
  it("averages the middle pair for even counts", () => {
    expect(median([1, 2, 3, 4])).toBe(2.5);
    expect(median([4, 1])).toBe(2.5);
  });

  it("takes the middle element for odd counts", () => {
    expect(median([3, 1, 2])).toBe(2);
  });
});
