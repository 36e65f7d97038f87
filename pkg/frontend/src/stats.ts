/**
 * Aggregation of sweep rows into plottable series.
 *
 * Summary semantics match the producer: per swept value, the mean of the
 * metric over instances and the sample standard deviation, with 0 reported
 * for a single instance.
 */

import type { SweepRow } from "./schema.js";

/** Numeric row fields that make sense on a y axis. */
export type MetricKey =
  | "diameter"
  | "z"
  | "mdSize"
  | "miSize"
  | "fiResidualMi"
  | "fiResidualAll";

/** One aggregated point of a series. */
export interface SeriesPoint {
  /** Swept parameter value. */
  x: number;
  /** Mean of the metric over instances at this value. */
  mean: number;
  /** Sample standard deviation; 0 for a single instance. */
  std: number;
  /** Number of instances aggregated. */
  count: number;
}

/** Arithmetic mean. */
export function mean(values: readonly number[]): number {
  let total = 0;
  for (const v of values) total += v;
  return total / values.length;
}

/** Sample standard deviation (n - 1 denominator); 0 below two samples. */
export function sampleStd(values: readonly number[]): number {
  if (values.length < 2) return 0;
  const m = mean(values);
  let ss = 0;
  for (const v of values) ss += (v - m) * (v - m);
  return Math.sqrt(ss / (values.length - 1));
}

/**
 * Group rows by family and swept value and aggregate one metric.
 *
 * @returns Map keyed by family in first-seen order; each series is sorted
 *   by the swept value.
 */
export function seriesPoints(
  rows: readonly SweepRow[],
  metric: MetricKey,
): Map<string, SeriesPoint[]> {
  const byFamily = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    let groups = byFamily.get(row.family);
    if (groups === undefined) {
      groups = new Map();
      byFamily.set(row.family, groups);
    }
    let bucket = groups.get(row.paramValue);
    if (bucket === undefined) {
      bucket = [];
      groups.set(row.paramValue, bucket);
    }
    bucket.push(row[metric]);
  }
  const out = new Map<string, SeriesPoint[]>();
  for (const [family, groups] of byFamily) {
    const points: SeriesPoint[] = [];
    for (const [x, values] of groups) {
      points.push({
        x,
        mean: mean(values),
        std: sampleStd(values),
        count: values.length,
      });
    }
    points.sort((a, b) => a.x - b.x);
    out.set(family, points);
  }
  return out;
}
