/** Group sweep rows into per-(lock,strategy) series of per-task-count medians. */

import { medianAcrossReps } from "./stats.js";
import { BenchRow, Metric, METRIC_COLUMN, Series, SeriesData } from "./types.js";

export function seriesKey(row: BenchRow): string {
  return `${row.lock}/${row.strategy}`;
}

export function buildSeries(rows: BenchRow[], metric: Metric): SeriesData {
  const column = METRIC_COLUMN[metric];
  const alive = rows.filter((row) => row.status === "ok");
  const excludedRows = rows.length - alive.length;

  const groups = new Map<string, Map<number, number[]>>();
  for (const row of alive) {
    const key = seriesKey(row);
    let byTasks = groups.get(key);
    if (byTasks === undefined) {
      byTasks = new Map();
      groups.set(key, byTasks);
    }
    let values = byTasks.get(row.tasks);
    if (values === undefined) {
      values = [];
      byTasks.set(row.tasks, values);
    }
    values.push(row[column] as number);
  }

  const series: Series[] = [...groups.entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([key, byTasks]) => ({
      key,
      points: [...byTasks.entries()]
        .sort(([a], [b]) => a - b)
        .map(([tasks, values]) => ({
          tasks,
          value: medianAcrossReps(values),
          repsUsed: values.length,
        })),
    }));

  const carrierCounts = [...new Set(alive.map((row) => row.carriers))]
    .sort((a, b) => a - b);

  return { series, carrierCounts, excludedRows };
}
