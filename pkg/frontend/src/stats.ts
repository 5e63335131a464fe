/** Nearest-rank quantiles, matching the benchmark harness exactly. */

export function nearestRankQuantile(values: number[], q: number): number {
  if (values.length === 0) {
    throw new Error("cannot take a quantile of no values");
  }
  if (!(q > 0 && q <= 1)) {
    throw new Error(`quantile fraction must be in (0, 1], got ${q}`);
  }
  const ordered = [...values].sort((a, b) => a - b);
  const rank = Math.max(1, Math.ceil(q * ordered.length));
  return ordered[rank - 1];
}

/** Median across repetitions: the q=0.5 nearest-rank quantile. */
export function medianAcrossReps(values: number[]): number {
  return nearestRankQuantile(values, 0.5);
}
