/** Row and figure types for the benchmark CSV schema. */

export interface BenchRow {
  lock: string;
  strategy: string;
  scenario: string;
  carriers: number;
  tasks: number;
  queues: number;
  rep: number;
  duration_s: number;
  acquisitions: number;
  throughput_per_s: number;
  lat_ns_q50: number;
  lat_ns_q95: number;
  lat_ns_q99: number;
  status: string;
}

export const CSV_COLUMNS: (keyof BenchRow)[] = [
  "lock", "strategy", "scenario", "carriers", "tasks", "queues", "rep",
  "duration_s", "acquisitions", "throughput_per_s",
  "lat_ns_q50", "lat_ns_q95", "lat_ns_q99", "status",
];

export type Metric = "throughput" | "q95_latency" | "q99_latency";

export const METRIC_COLUMN: Record<Metric, keyof BenchRow> = {
  throughput: "throughput_per_s",
  q95_latency: "lat_ns_q95",
  q99_latency: "lat_ns_q99",
};

export const METRIC_LABEL: Record<Metric, string> = {
  throughput: "throughput (acquisitions/s)",
  q95_latency: "lock latency q95 (ns)",
  q99_latency: "lock latency q99 (ns)",
};

export interface PlotSpec {
  metric: Metric;
  /** Optional figure title; defaults to the metric label. */
  title?: string;
}

export interface SeriesPoint {
  tasks: number;
  value: number;
  repsUsed: number;
}

export interface Series {
  /** Legend key: lock + strategy. */
  key: string;
  points: SeriesPoint[];
}

export interface SeriesData {
  series: Series[];
  /** Carrier counts present in the data (dashed marker per value). */
  carrierCounts: number[];
  /** Number of deadlocked rows left out of the series. */
  excludedRows: number;
}
