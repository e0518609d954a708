/** Oblique-projected ribbon surfaces for profile-vs-sweep-parameter plots.
 *
 * Each (sweep value, type) contributes one profile curve N(x); curves are
 * drawn back to front as filled ribbons, which reads as a surface without
 * any real 3D machinery. */

import { scaleLinear } from "d3-scale";

import { el, pathOf, text } from "./svg.js";
import type { Panel } from "./marks.js";

export interface ProfileCurve {
  depth: number; // sweep-parameter value
  label: string;
  color: string;
  xs: number[];
  ys: number[];
}

const DEPTH_DX = 0.45; // screen offset per unit of projected depth
const DEPTH_DY = 0.35;

export function drawSurface(
  panel: Panel,
  curves: ProfileCurve[],
  xLabel: string,
  depthLabel: string,
  title = "",
): string {
  const depthSpan = panel.width * 0.35;
  const xSpan = panel.width - depthSpan;
  const ySpan = panel.height * 0.55;

  const xs = curves.flatMap((c) => c.xs);
  const ys = curves.flatMap((c) => c.ys);
  const depths = curves.map((c) => c.depth);
  const sx = scaleLinear().domain([Math.min(...xs), Math.max(...xs)])
    .range([0, xSpan]);
  const sy = scaleLinear().domain([0, Math.max(...ys, 1e-12)])
    .range([0, ySpan]);
  const sd = scaleLinear().domain([Math.min(...depths), Math.max(...depths)])
    .range([0, depthSpan / DEPTH_DX]);

  const originX = panel.x0;
  const originY = panel.y0 + panel.height - 25;
  const project = (x: number, n: number, depth: number): [number, number] => [
    originX + sx(x) + DEPTH_DX * sd(depth),
    originY - sy(n) - DEPTH_DY * sd(depth),
  ];

  // painter's order: farthest (largest depth) first
  const ordered = [...curves].sort((a, b) => b.depth - a.depth);
  const parts: string[] = [];
  for (const curve of ordered) {
    const top = curve.xs.map((x, i) => project(x, curve.ys[i], curve.depth));
    const base: Array<[number, number]> = [
      project(curve.xs[curve.xs.length - 1], 0, curve.depth),
      project(curve.xs[0], 0, curve.depth),
    ];
    parts.push(
      el("path", {
        d: pathOf([...top, ...base], true),
        fill: curve.color,
        "fill-opacity": 0.55,
        stroke: curve.color,
        "stroke-width": 1,
      }),
    );
  }

  const axisEnd = project(sx.domain()[1], 0, sd.domain()[0]);
  const depthEnd = project(sx.domain()[0], 0, sd.domain()[1]);
  const front = project(sx.domain()[0], 0, sd.domain()[0]);
  parts.push(
    el("line", { x1: front[0], y1: front[1], x2: axisEnd[0], y2: axisEnd[1], stroke: "#333333" }),
    el("line", { x1: front[0], y1: front[1], x2: depthEnd[0], y2: depthEnd[1], stroke: "#333333" }),
    text(xLabel, {
      x: (front[0] + axisEnd[0]) / 2,
      y: front[1] + 16,
      "font-size": 11,
      "text-anchor": "middle",
      fill: "#111111",
    }),
    text(depthLabel, {
      x: depthEnd[0] + 10,
      y: depthEnd[1],
      "font-size": 11,
      fill: "#111111",
    }),
  );
  if (title) {
    parts.push(
      text(title, {
        x: panel.x0 + panel.width / 2,
        y: panel.y0 + 4,
        "font-size": 12,
        "text-anchor": "middle",
        fill: "#111111",
      }),
    );
  }
  return parts.join("");
}
