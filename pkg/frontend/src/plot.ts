/** File-level entry: CSV in, SVG figure out. */

import { readFileSync, writeFileSync } from "node:fs";
import { parseBenchCsv } from "./csv.js";
import { buildSeries } from "./series.js";
import { renderSvg } from "./svg.js";
import { PlotSpec } from "./types.js";

export function render(csvPath: string, spec: PlotSpec, outPath: string): void {
  if (!outPath.endsWith(".svg")) {
    throw new Error(`output must be an .svg path, got ${outPath}`);
  }
  const rows = parseBenchCsv(readFileSync(csvPath, "utf-8"));
  const data = buildSeries(rows, spec.metric);
  writeFileSync(outPath, renderSvg(data, spec));
}
