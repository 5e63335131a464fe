import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { main } from "../src/cli.js";
import { parseBenchCsv } from "../src/csv.js";
import { render } from "../src/plot.js";
import { buildSeries } from "../src/series.js";
import { renderSvg } from "../src/svg.js";

const fixturePath = new URL("../fixtures/sweep_fixture.csv", import.meta.url).pathname;
const rows = parseBenchCsv(readFileSync(fixturePath, "utf-8"));

function occurrences(text: string, needle: string): number {
  return text.split(needle).length - 1;
}

describe("renderSvg", () => {
  const svg = renderSvg(buildSeries(rows, "throughput"), { metric: "throughput" });

  it("draws one polyline per series", () => {
    expect(occurrences(svg, "<polyline class=\"series\"")).toBe(3);
    expect(svg).toContain("data-key=\"MCS/SYS\"");
    expect(svg).toContain("data-key=\"MCS/*Y*\"");
    expect(svg).toContain("data-key=\"TTAS-MCS-4/SYS\"");
  });

  it("lists every series exactly once in the legend", () => {
    expect(occurrences(svg, "class=\"legend-entry\"")).toBe(3);
    expect(occurrences(svg, ">MCS/SYS</text>")).toBe(1);
    expect(occurrences(svg, ">MCS/*Y*</text>")).toBe(1);
    expect(occurrences(svg, ">TTAS-MCS-4/SYS</text>")).toBe(1);
  });

  it("marks the carrier count with a dashed vertical line", () => {
    expect(occurrences(svg, "class=\"carrier-marker\"")).toBe(1);
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain("carriers = 2");
  });

  it("notes the excluded deadlocked runs in the caption", () => {
    expect(svg).toContain("class=\"caption-note\"");
    expect(svg).toMatch(/note: \d+ deadlocked runs excluded/);
  });

  it("omits the caption when nothing was excluded", () => {
    const aliveOnly = rows.filter((r) => r.status === "ok");
    const clean = renderSvg(buildSeries(aliveOnly, "throughput"), { metric: "throughput" });
    expect(clean).not.toContain("caption-note");
  });

  it("refuses an empty series set", () => {
    expect(() => renderSvg(buildSeries([], "throughput"), { metric: "throughput" }))
      .toThrow(/nothing to plot/);
  });
});

describe("render + cli", () => {
  it("writes an SVG file from a CSV path", () => {
    const out = join(mkdtempSync(join(tmpdir(), "plots-")), "fig.svg");
    render(fixturePath, { metric: "q99_latency" }, out);
    const svg = readFileSync(out, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("lock latency q99 (ns)");
  });

  it("rejects non-svg output paths", () => {
    expect(() => render(fixturePath, { metric: "throughput" }, "fig.png"))
      .toThrow(/\.svg/);
  });

  it("cli happy path exits 0", () => {
    const out = join(mkdtempSync(join(tmpdir(), "plots-")), "cli.svg");
    expect(main(["--csv", fixturePath, "--metric", "throughput", "--out", out])).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
  });

  it("cli rejects unknown metrics and missing flags", () => {
    expect(main(["--csv", fixturePath, "--metric", "p50", "--out", "x.svg"])).toBe(2);
    expect(main(["--metric", "throughput"])).toBe(2);
  });

  it("cli surfaces malformed csv as a nonzero exit", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "lock,strategy\nMCS,SYS\n");
    expect(main(["--csv", bad, "--metric", "throughput",
                 "--out", join(dir, "fig.svg")])).toBe(1);
  });
});
