/**
 * Minimal dependency-free SVG renderer for error-bar line figures.
 *
 * Output is a standalone SVG document: white background, linear axes with
 * nice tick values, one polyline per series with circular markers and
 * vertical mean +/- std error bars, and a legend. Nonfinite means (an
 * infinite diameter from a disconnected instance) are dropped from both
 * the extent and the drawing.
 */

import type { SeriesPoint } from "./stats.js";

/** One named series of aggregated points. */
export interface FigureSeries {
  name: string;
  points: SeriesPoint[];
}

/** Everything needed to draw one figure. */
export interface FigureSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: FigureSeries[];
}

/** Pixel geometry of the rendered figure. */
export interface RenderOptions {
  width?: number;
  height?: number;
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

const MARGIN = { top: 40, right: 24, bottom: 52, left: 62 };

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Trim float noise from tick values produced by the 1-2-5 stepping. */
function fmt(value: number): string {
  return String(Number(value.toPrecision(10)));
}

/** Round pixel coordinates to keep the output compact and stable. */
function px(value: number): string {
  return String(Math.round(value * 100) / 100);
}

/** Nice tick values covering [lo, hi] with a 1-2-5 step. */
export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(1, target);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * mag;
    if (step >= rawStep) break;
  }
  const ticks: number[] = [];
  let t = Math.ceil(lo / step) * step;
  for (; t <= hi + step * 1e-9; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

interface Extent {
  lo: number;
  hi: number;
}

function padExtent(ext: Extent, frac: number): Extent {
  if (ext.hi === ext.lo) {
    const pad = ext.lo === 0 ? 1 : Math.abs(ext.lo) * 0.5;
    return { lo: ext.lo - pad, hi: ext.hi + pad };
  }
  const pad = (ext.hi - ext.lo) * frac;
  return { lo: ext.lo - pad, hi: ext.hi + pad };
}

/**
 * Render a figure spec to a standalone SVG document string.
 */
export function renderFigure(
  spec: FigureSpec,
  opts: RenderOptions = {},
): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const drawn = spec.series.map((s) => ({
    name: s.name,
    points: s.points.filter(
      (p) => Number.isFinite(p.mean) && Number.isFinite(p.x),
    ),
  }));
  const allPoints = drawn.flatMap((s) => s.points);
  if (allPoints.length === 0) {
    throw new Error(`figure '${spec.title}' has no finite points`);
  }

  let xExt: Extent = {
    lo: Math.min(...allPoints.map((p) => p.x)),
    hi: Math.max(...allPoints.map((p) => p.x)),
  };
  let yExt: Extent = {
    lo: Math.min(...allPoints.map((p) => p.mean - p.std)),
    hi: Math.max(...allPoints.map((p) => p.mean + p.std)),
  };
  xExt = padExtent(xExt, 0.06);
  yExt = padExtent(yExt, 0.08);

  const sx = (v: number): number =>
    MARGIN.left + ((v - xExt.lo) / (xExt.hi - xExt.lo)) * plotW;
  const sy = (v: number): number =>
    MARGIN.top + plotH - ((v - yExt.lo) / (yExt.hi - yExt.lo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}" ` +
      `font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${width / 2}" y="22" text-anchor="middle" font-size="15" ` +
      `fill="#111111">${escapeXml(spec.title)}</text>`,
  );

  // grid and ticks
  const xTicks = niceTicks(xExt.lo, xExt.hi, 6);
  const yTicks = niceTicks(yExt.lo, yExt.hi, 6);
  for (const t of yTicks) {
    const y = sy(t);
    parts.push(
      `<line x1="${px(MARGIN.left)}" y1="${px(y)}" ` +
        `x2="${px(MARGIN.left + plotW)}" y2="${px(y)}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(MARGIN.left - 8)}" y="${px(y + 4)}" ` +
        `text-anchor="end" font-size="11" fill="#444444">${fmt(t)}</text>`,
    );
  }
  for (const t of xTicks) {
    const x = sx(t);
    parts.push(
      `<line x1="${px(x)}" y1="${px(MARGIN.top + plotH)}" ` +
        `x2="${px(x)}" y2="${px(MARGIN.top + plotH + 5)}" ` +
        `stroke="#444444" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(x)}" y="${px(MARGIN.top + plotH + 20)}" ` +
        `text-anchor="middle" font-size="11" fill="#444444">${fmt(t)}</text>`,
    );
  }

  // axes
  parts.push(
    `<line x1="${px(MARGIN.left)}" y1="${px(MARGIN.top + plotH)}" ` +
      `x2="${px(MARGIN.left + plotW)}" y2="${px(MARGIN.top + plotH)}" ` +
      `stroke="#111111" stroke-width="1.5"/>`,
  );
  parts.push(
    `<line x1="${px(MARGIN.left)}" y1="${px(MARGIN.top)}" ` +
      `x2="${px(MARGIN.left)}" y2="${px(MARGIN.top + plotH)}" ` +
      `stroke="#111111" stroke-width="1.5"/>`,
  );
  parts.push(
    `<text x="${px(MARGIN.left + plotW / 2)}" y="${px(height - 12)}" ` +
      `text-anchor="middle" font-size="13" fill="#111111">` +
      `${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${px(MARGIN.top + plotH / 2)}" text-anchor="middle" ` +
      `font-size="13" fill="#111111" transform="rotate(-90 16 ` +
      `${px(MARGIN.top + plotH / 2)})">${escapeXml(spec.yLabel)}</text>`,
  );

  // series
  drawn.forEach((series, si) => {
    const color = PALETTE[si % PALETTE.length] as string;
    const pts = series.points;
    if (pts.length === 0) return;
    for (const p of pts) {
      if (p.std <= 0) continue;
      const x = sx(p.x);
      const yLo = sy(p.mean - p.std);
      const yHi = sy(p.mean + p.std);
      parts.push(
        `<line class="errorbar" x1="${px(x)}" y1="${px(yLo)}" ` +
          `x2="${px(x)}" y2="${px(yHi)}" stroke="${color}" ` +
          `stroke-width="1.2"/>`,
      );
      for (const y of [yLo, yHi]) {
        parts.push(
          `<line x1="${px(x - 4)}" y1="${px(y)}" x2="${px(x + 4)}" ` +
            `y2="${px(y)}" stroke="${color}" stroke-width="1.2"/>`,
        );
      }
    }
    if (pts.length > 1) {
      const coords = pts.map((p) => `${px(sx(p.x))},${px(sy(p.mean))}`);
      parts.push(
        `<polyline points="${coords.join(" ")}" fill="none" ` +
          `stroke="${color}" stroke-width="1.8"/>`,
      );
    }
    for (const p of pts) {
      parts.push(
        `<circle cx="${px(sx(p.x))}" cy="${px(sy(p.mean))}" r="3.2" ` +
          `fill="${color}"/>`,
      );
    }
  });

  // legend, top right inside the plot area
  drawn.forEach((series, si) => {
    const color = PALETTE[si % PALETTE.length] as string;
    const y = MARGIN.top + 14 + si * 18;
    const x = MARGIN.left + plotW - 10;
    parts.push(
      `<line x1="${px(x - 150)}" y1="${px(y - 4)}" x2="${px(x - 126)}" ` +
        `y2="${px(y - 4)}" stroke="${color}" stroke-width="2.5"/>`,
    );
    parts.push(
      `<text x="${px(x - 120)}" y="${px(y)}" font-size="12" ` +
        `fill="#111111">${escapeXml(series.name)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
