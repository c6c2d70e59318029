/** Order statistics for boxplots. */

export interface BoxStats {
  n: number;
  /** Smallest sample value (lower whisker end). */
  lo: number;
  q1: number;
  median: number;
  q3: number;
  /** Largest sample value (upper whisker end). */
  hi: number;
}

/**
 * Linear-interpolation quantile of an ascending sample: the p-quantile sits
 * at position p * (n - 1). Matches the summary statistics the simulator
 * prints (Python statistics.quantiles, method="inclusive").
 */
export function quantile(sorted: readonly number[], p: number): number {
  if (sorted.length === 0) throw new Error("quantile of an empty sample");
  if (p < 0 || p > 1) throw new Error(`quantile fraction ${p} outside [0, 1]`);
  const pos = p * (sorted.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(sorted.length - 1, lo + 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

export function boxStats(values: readonly number[]): BoxStats {
  if (values.length === 0) throw new Error("box statistics of an empty sample");
  const sorted = [...values].sort((a, b) => a - b);
  return {
    n: sorted.length,
    lo: sorted[0],
    q1: quantile(sorted, 0.25),
    median: quantile(sorted, 0.5),
    q3: quantile(sorted, 0.75),
    hi: sorted[sorted.length - 1],
  };
}
