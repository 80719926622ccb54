/**
 * Quantile helpers matching the simulator's aggregation (linear
 * interpolation between order statistics, the numpy default).
 */

export function quantile(values: number[], q: number): number {
  if (values.length === 0) {
    throw new Error("quantile of empty sample");
  }
  if (q < 0 || q > 100) {
    throw new Error(`quantile q=${q} outside [0, 100]`);
  }
  const sorted = [...values].sort((a, b) => a - b);
  const h = ((sorted.length - 1) * q) / 100;
  const lo = Math.floor(h);
  const frac = h - lo;
  if (lo + 1 >= sorted.length) {
    return sorted[sorted.length - 1];
  }
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

export function median(values: number[]): number {
  return quantile(values, 50);
}
