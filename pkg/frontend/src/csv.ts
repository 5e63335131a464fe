/** Strict parser for the benchmark sweep CSV. */

import Papa from "papaparse";
import { BenchRow, CSV_COLUMNS } from "./types.js";

const NUMERIC: (keyof BenchRow)[] = [
  "carriers", "tasks", "queues", "rep", "duration_s", "acquisitions",
  "throughput_per_s", "lat_ns_q50", "lat_ns_q95", "lat_ns_q99",
];

export function parseBenchCsv(text: string): BenchRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`malformed CSV at row ${first.row}: ${first.message}`);
  }
  const header = parsed.meta.fields ?? [];
  if (header.join(",") !== CSV_COLUMNS.join(",")) {
    throw new Error(
      `unexpected CSV header [${header.join(",")}]; ` +
      `expected [${CSV_COLUMNS.join(",")}]`,
    );
  }
  return parsed.data.map((raw, index) => {
    const row: Record<string, string | number> = { ...raw };
    for (const field of NUMERIC) {
      const value = Number(raw[field]);
      if (!Number.isFinite(value)) {
        throw new Error(`row ${index + 1}: field ${field} is not numeric: ${raw[field]}`);
      }
      row[field] = value;
    }
    return row as unknown as BenchRow;
  });
}
