/** Shared plotting pieces: panels, axes, line series, legends. */

import { scaleLinear, type ScaleLinear } from "d3-scale";
import { schemeCategory10 } from "d3-scale-chromatic";

import { el, pathOf, text } from "./svg.js";

export const PALETTE: readonly string[] = schemeCategory10;
export const MEAN_LINE_COLOR = "#d62728";

export interface Panel {
  x0: number;
  y0: number;
  width: number;
  height: number;
}

export interface Scales {
  sx: ScaleLinear<number, number>;
  sy: ScaleLinear<number, number>;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo < hi)) {
    hi = lo === Infinity ? 1 : lo + 1;
    lo = lo === Infinity ? 0 : lo - 1;
  }
  return [lo, hi];
}

export function padded([lo, hi]: [number, number], frac = 0.05): [number, number] {
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}

export function makeScales(
  panel: Panel,
  xDomain: [number, number],
  yDomain: [number, number],
): Scales {
  return {
    sx: scaleLinear().domain(xDomain).range([panel.x0, panel.x0 + panel.width]),
    sy: scaleLinear().domain(yDomain).range([panel.y0 + panel.height, panel.y0]),
  };
}

export function axes(
  panel: Panel,
  scales: Scales,
  xLabel: string,
  yLabel: string,
  title = "",
): string {
  const { sx, sy } = scales;
  const bottom = panel.y0 + panel.height;
  const parts: string[] = [];
  parts.push(
    el("rect", {
      x: panel.x0,
      y: panel.y0,
      width: panel.width,
      height: panel.height,
      fill: "none",
      stroke: "#333333",
      "stroke-width": 1,
    }),
  );
  for (const tick of sx.ticks(6)) {
    const px = sx(tick);
    parts.push(
      el("line", { x1: px, y1: bottom, x2: px, y2: bottom + 4, stroke: "#333333" }),
      text(trim(tick), {
        x: px,
        y: bottom + 15,
        "font-size": 10,
        "text-anchor": "middle",
        fill: "#333333",
      }),
    );
  }
  for (const tick of sy.ticks(6)) {
    const py = sy(tick);
    parts.push(
      el("line", { x1: panel.x0 - 4, y1: py, x2: panel.x0, y2: py, stroke: "#333333" }),
      text(trim(tick), {
        x: panel.x0 - 7,
        y: py + 3,
        "font-size": 10,
        "text-anchor": "end",
        fill: "#333333",
      }),
    );
  }
  parts.push(
    text(xLabel, {
      x: panel.x0 + panel.width / 2,
      y: bottom + 30,
      "font-size": 12,
      "text-anchor": "middle",
      fill: "#111111",
    }),
    ptLabel(panel, yLabel),
  );
  if (title) {
    parts.push(
      text(title, {
        x: panel.x0 + panel.width / 2,
        y: panel.y0 - 8,
        "font-size": 12,
        "text-anchor": "middle",
        fill: "#111111",
      }),
    );
  }
  return parts.join("");
}

function ptLabel(panel: Panel, label: string): string {
  const x = panel.x0 - 35;
  const y = panel.y0 + panel.height / 2;
  return text(label, {
    x,
    y,
    "font-size": 12,
    "text-anchor": "middle",
    fill: "#111111",
    transform: `rotate(-90 ${x} ${y})`,
  });
}

function trim(v: number): string {
  return Number.isInteger(v) ? String(v) : String(Math.round(v * 1000) / 1000);
}

export interface Series {
  label: string;
  points: Array<[number, number]>;
  color: string;
  dashed?: boolean;
  width?: number;
}

export function drawSeries(scales: Scales, series: Series): string {
  const pts = series.points
    .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y))
    .map(([x, y]) => [scales.sx(x), scales.sy(y)] as [number, number]);
  if (pts.length === 0) return "";
  return el("path", {
    d: pathOf(pts),
    fill: "none",
    stroke: series.color,
    "stroke-width": series.width ?? 1.5,
    ...(series.dashed ? { "stroke-dasharray": "5,3" } : {}),
  });
}

export function legend(entries: Series[], x: number, y: number): string {
  const parts: string[] = [];
  entries.forEach((s, i) => {
    const py = y + 14 * i;
    parts.push(
      el("line", {
        x1: x,
        y1: py - 3,
        x2: x + 18,
        y2: py - 3,
        stroke: s.color,
        "stroke-width": s.width ?? 1.5,
        ...(s.dashed ? { "stroke-dasharray": "5,3" } : {}),
      }),
      text(s.label, { x: x + 23, y: py, "font-size": 10, fill: "#111111" }),
    );
  });
  return parts.join("");
}
