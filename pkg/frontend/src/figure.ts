/**
 * Deterministic SVG line figures for the four paper-style plot kinds.
 *
 * Everything is rendered from scratch (scales, ticks, polylines, error bars,
 * legend) so that a fixed input always produces byte-identical output.
 */

import { MetricsRow, schemesInOrder } from "./schema.js";

export type FigureKind =
  | "success-vs-snr"
  | "rate-vs-snr"
  | "ablation"
  | "success-vs-distance";

export const FIGURE_KINDS: FigureKind[] = [
  "success-vs-snr",
  "rate-vs-snr",
  "ablation",
  "success-vs-distance",
];

export interface FigureSpec {
  kind: FigureKind;
  /** Optional subset of schemes to draw; empty means "all in CSV order". */
  schemes?: string[];
  /** Display-label overrides per scheme name. */
  labels?: Record<string, string>;
  width?: number;
  height?: number;
}

interface KindConfig {
  pointKind: string;
  xLabel: string;
  yLabel: string;
  yValue: (row: MetricsRow) => number;
  errorBars: boolean;
  yDomain?: [number, number];
}

const KIND_CONFIG: Record<FigureKind, KindConfig> = {
  "success-vs-snr": {
    pointKind: "snr_db",
    xLabel: "SNR (dB)",
    yLabel: "beam training success rate",
    yValue: (r) => r.success_rate,
    errorBars: true,
    yDomain: [0, 1],
  },
  "rate-vs-snr": {
    pointKind: "snr_db",
    xLabel: "SNR (dB)",
    yLabel: "achievable rate (bit/s/Hz)",
    yValue: (r) => r.mean_rate,
    // se_rate describes the success estimate, not the rate; no bars here.
    errorBars: false,
  },
  ablation: {
    pointKind: "snr_db",
    xLabel: "SNR (dB)",
    yLabel: "beam training success rate",
    yValue: (r) => r.success_rate,
    errorBars: true,
    yDomain: [0, 1],
  },
  "success-vs-distance": {
    pointKind: "distance_m",
    xLabel: "BS-UE distance (m)",
    yLabel: "beam training success rate",
    yValue: (r) => r.success_rate,
    errorBars: true,
    yDomain: [0, 1],
  },
};

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARKERS = ["circle", "square", "diamond", "triangle"] as const;

export class FigureError extends Error {}

function linearScale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

/** Round tick positions covering [lo, hi] with a 1/2/5 step. */
function ticks(lo: number, hi: number, target = 6): number[] {
  const span = hi - lo || 1;
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= target)!;
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + 1e-9; v += step) {
    out.push(Math.abs(v) < 1e-12 ? 0 : v);
  }
  return out;
}

function fmt(v: number): string {
  const rounded = Math.round(v * 1e6) / 1e6;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

function markerSvg(shape: (typeof MARKERS)[number], x: number, y: number, color: string): string {
  const s = 3.5;
  switch (shape) {
    case "circle":
      return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${s}" fill="${color}"/>`;
    case "square":
      return `<rect x="${fmt(x - s)}" y="${fmt(y - s)}" width="${2 * s}" height="${2 * s}" fill="${color}"/>`;
    case "diamond":
      return `<path d="M ${fmt(x)} ${fmt(y - s)} L ${fmt(x + s)} ${fmt(y)} L ${fmt(x)} ${fmt(y + s)} L ${fmt(x - s)} ${fmt(y)} Z" fill="${color}"/>`;
    case "triangle":
      return `<path d="M ${fmt(x)} ${fmt(y - s)} L ${fmt(x + s)} ${fmt(y + s)} L ${fmt(x - s)} ${fmt(y + s)} Z" fill="${color}"/>`;
  }
}

/** Render one figure; throws FigureError on spec/data mismatches. */
export function renderFigure(spec: FigureSpec, rows: MetricsRow[]): string {
  const config = KIND_CONFIG[spec.kind];
  if (!config) {
    throw new FigureError(`unknown figure kind ${JSON.stringify(spec.kind)}`);
  }
  const usable = rows.filter((r) => r.point_kind === config.pointKind);
  if (usable.length === 0) {
    throw new FigureError(
      `no rows with point_kind ${config.pointKind} for kind ${spec.kind}`,
    );
  }
  const available = schemesInOrder(usable);
  const wanted = spec.schemes && spec.schemes.length > 0 ? spec.schemes : available;
  if (wanted.length === 0) {
    throw new FigureError("empty scheme filter: nothing to plot");
  }
  for (const scheme of wanted) {
    if (!available.includes(scheme)) {
      throw new FigureError(`scheme ${JSON.stringify(scheme)} not present in the CSV`);
    }
  }
  // Legend order follows first appearance in the CSV, not the filter order.
  const schemes = available.filter((s) => wanted.includes(s));

  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const margin = { left: 64, right: 16, top: 16, bottom: 48 };

  const xs = usable.map((r) => r.point_value);
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  if (xLo === xHi) {
    xLo -= 1;
    xHi += 1;
  }
  let yLo: number;
  let yHi: number;
  if (config.yDomain) {
    [yLo, yHi] = config.yDomain;
  } else {
    const ys = usable.map(config.yValue);
    yLo = 0;
    yHi = Math.max(...ys) * 1.05 || 1;
  }
  const sx = linearScale([xLo, xHi], [margin.left, width - margin.right]);
  const sy = linearScale([yLo, yHi], [height - margin.bottom, margin.top]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // Axes, grid, ticks.
  const axisColor = "#333333";
  const plotBottom = height - margin.bottom;
  for (const t of ticks(xLo, xHi)) {
    const x = sx(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${margin.top}" x2="${fmt(x)}" y2="${plotBottom}" stroke="#dddddd"/>`,
      `<text x="${fmt(x)}" y="${plotBottom + 18}" text-anchor="middle" fill="${axisColor}">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(yLo, yHi)) {
    const y = sy(t);
    parts.push(
      `<line x1="${margin.left}" y1="${fmt(y)}" x2="${width - margin.right}" y2="${fmt(y)}" stroke="#dddddd"/>`,
      `<text x="${margin.left - 8}" y="${fmt(y + 4)}" text-anchor="end" fill="${axisColor}">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<line x1="${margin.left}" y1="${plotBottom}" x2="${width - margin.right}" y2="${plotBottom}" stroke="${axisColor}"/>`,
    `<line x1="${margin.left}" y1="${margin.top}" x2="${margin.left}" y2="${plotBottom}" stroke="${axisColor}"/>`,
    `<text x="${fmt((margin.left + width - margin.right) / 2)}" y="${height - 10}" text-anchor="middle" fill="${axisColor}">${config.xLabel}</text>`,
    `<text transform="translate(16 ${fmt((margin.top + plotBottom) / 2)}) rotate(-90)" text-anchor="middle" fill="${axisColor}">${config.yLabel}</text>`,
  );

  // One polyline with markers and optional error bars per scheme.
  schemes.forEach((scheme, si) => {
    const color = PALETTE[si % PALETTE.length];
    const marker = MARKERS[si % MARKERS.length];
    const series = usable
      .filter((r) => r.scheme === scheme)
      .sort((a, b) => a.point_value - b.point_value);
    const pts = series.map((r) => [sx(r.point_value), sy(config.yValue(r))] as const);
    const path = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    parts.push(
      `<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    if (config.errorBars) {
      series.forEach((r) => {
        const half = 1.96 * r.se_rate;
        const x = sx(r.point_value);
        const y1 = sy(Math.max(yLo, config.yValue(r) - half));
        const y2 = sy(Math.min(yHi, config.yValue(r) + half));
        parts.push(
          `<line x1="${fmt(x)}" y1="${fmt(y1)}" x2="${fmt(x)}" y2="${fmt(y2)}" stroke="${color}"/>`,
          `<line x1="${fmt(x - 3)}" y1="${fmt(y1)}" x2="${fmt(x + 3)}" y2="${fmt(y1)}" stroke="${color}"/>`,
          `<line x1="${fmt(x - 3)}" y1="${fmt(y2)}" x2="${fmt(x + 3)}" y2="${fmt(y2)}" stroke="${color}"/>`,
        );
      });
    }
    pts.forEach(([x, y]) => parts.push(markerSvg(marker, x, y, color)));
  });

  // Legend in CSV order, top-left inside the plot area.
  schemes.forEach((scheme, si) => {
    const color = PALETTE[si % PALETTE.length];
    const y = margin.top + 16 + 18 * si;
    const label = spec.labels?.[scheme] ?? scheme;
    parts.push(
      `<line x1="${margin.left + 10}" y1="${fmt(y - 4)}" x2="${margin.left + 34}" y2="${fmt(y - 4)}" stroke="${color}" stroke-width="1.8"/>`,
      markerSvg(MARKERS[si % MARKERS.length], margin.left + 22, y - 4, color),
      `<text x="${margin.left + 40}" y="${fmt(y)}" fill="${axisColor}">${label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
