/** Static SVG line figures: series of medians over a log-2 task axis. */

import { METRIC_LABEL, PlotSpec, SeriesData } from "./types.js";

const WIDTH = 860;
const HEIGHT = 520;
const MARGIN = { top: 48, right: 230, bottom: 64, left: 86 };

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

interface LinearScale {
  (value: number): number;
}

function logScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain.map(Math.log2);
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (value: number) => r0 + ((Math.log2(value) - d0) / span) * (r1 - r0);
}

function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

function niceTicks(max: number, count = 6): number[] {
  if (max <= 0) {
    return [0, 1];
  }
  const rough = max / count;
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * power)
    .find((s) => max / s <= count) ?? 10 * power;
  const ticks = [];
  for (let v = 0; v <= max + step / 2; v += step) {
    ticks.push(v);
  }
  return ticks;
}

function formatTick(value: number): string {
  if (value >= 1_000_000) return `${value / 1_000_000}M`;
  if (value >= 1_000) return `${value / 1_000}k`;
  return `${value}`;
}

const escapeXml = (text: string) =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderSvg(data: SeriesData, spec: PlotSpec): string {
  const title = spec.title ?? METRIC_LABEL[spec.metric];
  const allPoints = data.series.flatMap((s) => s.points);
  if (allPoints.length === 0) {
    throw new Error("nothing to plot: every row was excluded or the CSV was empty");
  }
  const taskValues = allPoints.map((p) => p.tasks);
  const xDomain: [number, number] = [
    Math.min(...taskValues, ...data.carrierCounts),
    Math.max(...taskValues, ...data.carrierCounts),
  ];
  const yMax = Math.max(...allPoints.map((p) => p.value));
  const yTicks = niceTicks(yMax);
  const yDomain: [number, number] = [0, yTicks[yTicks.length - 1]];

  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;
  const x = logScale(xDomain, [plotLeft, plotRight]);
  const y = linearScale(yDomain, [plotBottom, plotTop]);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" `
    + `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="13">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${plotLeft}" y="24" font-size="16" font-weight="bold">`
    + `${escapeXml(title)}</text>`);

  // axes and grid
  for (const tick of yTicks) {
    const ty = y(tick);
    parts.push(`<line x1="${plotLeft}" y1="${ty}" x2="${plotRight}" y2="${ty}" `
      + `stroke="#dddddd"/>`);
    parts.push(`<text x="${plotLeft - 8}" y="${ty + 4}" text-anchor="end">`
      + `${formatTick(tick)}</text>`);
  }
  const xTicks = [...new Set(taskValues)].sort((a, b) => a - b);
  for (const tick of xTicks) {
    const tx = x(tick);
    parts.push(`<line x1="${tx}" y1="${plotBottom}" x2="${tx}" y2="${plotBottom + 5}" `
      + `stroke="black"/>`);
    parts.push(`<text x="${tx}" y="${plotBottom + 20}" text-anchor="middle">${tick}</text>`);
  }
  parts.push(`<line x1="${plotLeft}" y1="${plotBottom}" x2="${plotRight}" y2="${plotBottom}" `
    + `stroke="black"/>`);
  parts.push(`<line x1="${plotLeft}" y1="${plotTop}" x2="${plotLeft}" y2="${plotBottom}" `
    + `stroke="black"/>`);
  parts.push(`<text x="${(plotLeft + plotRight) / 2}" y="${HEIGHT - 22}" `
    + `text-anchor="middle">tasks (log scale)</text>`);
  parts.push(`<text transform="rotate(-90 20 ${(plotTop + plotBottom) / 2})" x="20" `
    + `y="${(plotTop + plotBottom) / 2}" text-anchor="middle">`
    + `${escapeXml(METRIC_LABEL[spec.metric])}</text>`);

  // carrier markers
  for (const carriers of data.carrierCounts) {
    const cx = x(carriers);
    parts.push(`<line class="carrier-marker" x1="${cx}" y1="${plotTop}" `
      + `x2="${cx}" y2="${plotBottom}" stroke="#444444" stroke-dasharray="6,4"/>`);
    parts.push(`<text x="${cx + 4}" y="${plotTop + 14}" fill="#444444">`
      + `carriers = ${carriers}</text>`);
  }

  // series lines, points, legend (one legend entry per series)
  data.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    const coords = series.points
      .map((p) => `${x(p.tasks).toFixed(1)},${y(p.value).toFixed(1)}`)
      .join(" ");
    parts.push(`<polyline class="series" data-key="${escapeXml(series.key)}" `
      + `points="${coords}" fill="none" stroke="${color}" stroke-width="2"/>`);
    for (const point of series.points) {
      parts.push(`<circle cx="${x(point.tasks).toFixed(1)}" cy="${y(point.value).toFixed(1)}" `
        + `r="3.5" fill="${color}"/>`);
    }
    const ly = plotTop + 18 * index;
    parts.push(`<line x1="${plotRight + 14}" y1="${ly}" x2="${plotRight + 40}" y2="${ly}" `
      + `stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text class="legend-entry" x="${plotRight + 46}" y="${ly + 4}">`
      + `${escapeXml(series.key)}</text>`);
  });

  if (data.excludedRows > 0) {
    parts.push(`<text class="caption-note" x="${plotLeft}" y="${HEIGHT - 6}" `
      + `fill="#777777" font-size="11">note: ${data.excludedRows} deadlocked `
      + `run${data.excludedRows === 1 ? "" : "s"} excluded</text>`);
  }
  parts.push("</svg>");
  return parts.join("\n");
}
