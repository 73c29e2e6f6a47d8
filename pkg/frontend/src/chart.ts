/** Pure SVG rendering of a surprise-trace excerpt with the adaptive
 * threshold overlaid and the trigger instant marked. No DOM required.
 */

import { ProposalView, TraceExcerpt } from "./api.js";

export interface ChartOptions {
  width: number;
  height: number;
  margin: number;
}

export const DEFAULT_CHART: ChartOptions = { width: 420, height: 180, margin: 28 };

function scale(
  value: number,
  lo: number,
  hi: number,
  outLo: number,
  outHi: number,
): number {
  const span = hi - lo || 1;
  return outLo + ((value - lo) / span) * (outHi - outLo);
}

function polyline(
  xs: number[],
  ys: number[],
  xDomain: [number, number],
  yDomain: [number, number],
  opts: ChartOptions,
  stroke: string,
  dash = "",
): string {
  const pts = xs
    .map((x, i) => {
      const px = scale(x, xDomain[0], xDomain[1], opts.margin, opts.width - opts.margin);
      const py = scale(ys[i], yDomain[0], yDomain[1], opts.height - opts.margin, opts.margin);
      return `${px.toFixed(1)},${py.toFixed(1)}`;
    })
    .join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${pts}" fill="none" stroke="${stroke}"${dashAttr}/>`;
}

export function renderExcerptSvg(
  proposal: ProposalView,
  opts: ChartOptions = DEFAULT_CHART,
): string {
  const ex: TraceExcerpt | null = proposal.excerpt;
  if (!ex || ex.times.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${opts.width}" height="${opts.height}"><text x="${opts.width / 2}" y="${opts.height / 2}" text-anchor="middle">no trace excerpt</text></svg>`;
  }
  const xDomain: [number, number] = [ex.times[0], ex.times[ex.times.length - 1]];
  const all = ex.smoothed.concat(ex.tau);
  const yDomain: [number, number] = [Math.min(...all), Math.max(...all)];

  const triggerX = scale(
    proposal.time_s,
    xDomain[0],
    xDomain[1],
    opts.margin,
    opts.width - opts.margin,
  );
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${opts.width}" height="${opts.height}">`,
    `<rect width="${opts.width}" height="${opts.height}" fill="white"/>`,
    polyline(ex.times, ex.smoothed, xDomain, yDomain, opts, "#1f77b4"),
    polyline(ex.times, ex.tau, xDomain, yDomain, opts, "#d62728", "4 3"),
    `<line x1="${triggerX.toFixed(1)}" y1="${opts.margin}" x2="${triggerX.toFixed(1)}" y2="${opts.height - opts.margin}" stroke="#555" stroke-dasharray="2 2"/>`,
    `<text x="${opts.margin}" y="14" font-size="11">smoothed surprise</text>`,
    `<text x="${opts.width - opts.margin}" y="14" font-size="11" text-anchor="end" fill="#d62728">threshold</text>`,
    "</svg>",
  ];
  return parts.join("");
}

/** X-axis span in seconds; the excerpt is server-clipped to +/- its window. */
export function excerptSpanSeconds(ex: TraceExcerpt): number {
  if (ex.times.length < 2) {
    return 0;
  }
  return ex.times[ex.times.length - 1] - ex.times[0];
}
