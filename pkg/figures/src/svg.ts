/** A small deterministic SVG line-chart renderer.
 *
 * Series lines break wherever a point's y is null, so infeasible rows
 * show up as gaps rather than interpolated segments; isolated points
 * between gaps get a dot so they stay visible.  A series may carry a
 * band (mean plus/minus standard deviation) drawn as a translucent
 * region under its line.  Identical input always produces the
 * identical string: no timestamps, no randomness.
 */

import { BandPoint, Point, Series } from "./series.js";

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const WIDTH = 720;
const HEIGHT = 440;
const MARGIN = { top: 44, right: 18, bottom: 52, left: 68 };

export const PALETTE = [
  "#4269d0",
  "#efb118",
  "#ff725c",
  "#6cc5b0",
  "#3ca951",
  "#ff8ab7",
  "#a463f2",
  "#97bbf5",
];

/** Stable short decimal rendering for coordinates and tick labels. */
export function fmt(value: number): string {
  if (Object.is(value, -0)) {
    return "0";
  }
  return String(parseFloat(value.toPrecision(6)));
}

function tickValues(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const raw = (hi - lo) / target;
  const base = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = base * 10;
  for (const mult of [1, 2, 5]) {
    if (raw <= base * mult) {
      step = base * mult;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(parseFloat(v.toPrecision(12)));
  }
  return out;
}

interface Extent {
  lo: number;
  hi: number;
}

function finiteYs(series: Series[]): number[] {
  const ys: number[] = [];
  for (const s of series) {
    for (const p of s.points) {
      if (p.y !== null) {
        ys.push(p.y);
      }
    }
    for (const b of s.band ?? []) {
      ys.push(b.lo, b.hi);
    }
  }
  return ys;
}

function extent(values: number[], fallback: Extent): Extent {
  if (values.length === 0) {
    return fallback;
  }
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    const pad = Math.max(Math.abs(lo), 1) * 0.1;
    lo -= pad;
    hi += pad;
  }
  return { lo, hi };
}

function padExtent(e: Extent, frac: number): Extent {
  const pad = (e.hi - e.lo) * frac;
  return { lo: e.lo - pad, hi: e.hi + pad };
}

type Scale = (value: number) => number;

function makeScale(domain: Extent, rangeLo: number, rangeHi: number): Scale {
  const span = domain.hi - domain.lo;
  return (value) =>
    rangeLo + ((value - domain.lo) / span) * (rangeHi - rangeLo);
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function linePath(points: Point[], sx: Scale, sy: Scale): string {
  const parts: string[] = [];
  let pen = false;
  for (const p of points) {
    if (p.y === null) {
      pen = false;
      continue;
    }
    const cmd = pen ? "L" : "M";
    parts.push(`${cmd}${fmt(sx(p.x))},${fmt(sy(p.y))}`);
    pen = true;
  }
  return parts.join(" ");
}

function isolatedPoints(points: Point[]): Point[] {
  const out: Point[] = [];
  for (let i = 0; i < points.length; i++) {
    const here = points[i]!;
    if (here.y === null) {
      continue;
    }
    const before = i > 0 ? points[i - 1]!.y : null;
    const after = i + 1 < points.length ? points[i + 1]!.y : null;
    if (before === null && after === null) {
      out.push(here);
    }
  }
  return out;
}

function bandPath(band: BandPoint[], sx: Scale, sy: Scale): string {
  const upper = band.map((b) => `${fmt(sx(b.x))},${fmt(sy(b.hi))}`);
  const lower = [...band]
    .reverse()
    .map((b) => `${fmt(sx(b.x))},${fmt(sy(b.lo))}`);
  return `M${upper.join(" L")} L${lower.join(" L")} Z`;
}

export function renderChart(spec: ChartSpec): string {
  const xs = spec.series.flatMap((s) => s.points.map((p) => p.x));
  const xDomain = extent(xs, { lo: 0, hi: 1 });
  const yDomain = padExtent(extent(finiteYs(spec.series), { lo: 0, hi: 1 }), 0.05);

  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;
  const sx = makeScale(xDomain, plotLeft, plotRight);
  const sy = makeScale(yDomain, plotBottom, plotTop);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16" fill="#1a1a1a">` +
      `${escapeXml(spec.title)}</text>`,
  );

  for (const tick of tickValues(yDomain.lo, yDomain.hi)) {
    const y = fmt(sy(tick));
    parts.push(
      `<line x1="${plotLeft}" y1="${y}" x2="${plotRight}" y2="${y}" ` +
        `stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${plotLeft - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11" fill="#555555">${fmt(tick)}</text>`,
    );
  }
  for (const tick of tickValues(xDomain.lo, xDomain.hi)) {
    const x = fmt(sx(tick));
    parts.push(
      `<line x1="${x}" y1="${plotBottom}" x2="${x}" y2="${plotBottom + 5}" ` +
        `stroke="#555555" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${plotBottom + 18}" text-anchor="middle" ` +
        `font-size="11" fill="#555555">${fmt(tick)}</text>`,
    );
  }

  spec.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    if (s.band && s.band.length > 1) {
      parts.push(
        `<path d="${bandPath(s.band, sx, sy)}" fill="${color}" ` +
          `fill-opacity="0.15" stroke="none"/>`,
      );
    }
  });
  spec.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const d = linePath(s.points, sx, sy);
    if (d !== "") {
      parts.push(
        `<path d="${d}" fill="none" stroke="${color}" stroke-width="1.75"/>`,
      );
    }
    for (const p of isolatedPoints(s.points)) {
      parts.push(
        `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y!))}" r="2.5" fill="${color}"/>`,
      );
    }
  });

  parts.push(
    `<line x1="${plotLeft}" y1="${plotTop}" x2="${plotLeft}" y2="${plotBottom}" ` +
      `stroke="#1a1a1a" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="${plotLeft}" y1="${plotBottom}" x2="${plotRight}" y2="${plotBottom}" ` +
      `stroke="#1a1a1a" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${(plotLeft + plotRight) / 2}" y="${HEIGHT - 12}" text-anchor="middle" ` +
      `font-size="12" fill="#1a1a1a">${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" ` +
      `font-size="12" fill="#1a1a1a" transform="rotate(-90 18 ${
        (plotTop + plotBottom) / 2
      })">${escapeXml(spec.yLabel)}</text>`,
  );

  spec.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const y = plotTop + 8 + i * 18;
    const x = plotRight - 170;
    parts.push(
      `<line x1="${x}" y1="${y}" x2="${x + 20}" y2="${y}" ` +
        `stroke="${color}" stroke-width="2.5"/>`,
    );
    parts.push(
      `<text x="${x + 26}" y="${y}" dominant-baseline="middle" ` +
        `font-size="11" fill="#1a1a1a">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
