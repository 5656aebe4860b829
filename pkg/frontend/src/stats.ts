/**
 * The only statistics plotgen is allowed to compute: order statistics of the
 * input rows. Everything else ships in the CSVs produced by the kerf CLI.
 */

export function quantile(values: number[], q: number): number {
  if (values.length === 0) {
    throw new Error("quantile of an empty sample");
  }
  if (q < 0 || q > 1) {
    throw new Error(`quantile level must be in [0, 1], got ${q}`);
  }
  const sorted = [...values].sort((a, b) => a - b);
  const pos = (sorted.length - 1) * q;
  const base = Math.floor(pos);
  const rest = pos - base;
  if (sorted[base + 1] !== undefined) {
    return sorted[base] + rest * (sorted[base + 1] - sorted[base]);
  }
  return sorted[base];
}

export function median(values: number[]): number {
  return quantile(values, 0.5);
}
