/** One renderer per figure id: CSV tables in, full SVG document out.
 *
 * Renderers only map columns to marks; no model quantity is recomputed
 * here. Mean reference curves (m_H <= m_G <= m_A) are drawn dashed red
 * wherever the dataset carries them.
 */

import { interpolateViridis } from "d3-scale-chromatic";
import { scaleLinear } from "d3-scale";

import {
  groupBy,
  numericColumn,
  column,
  requireColumns,
  type Table,
} from "./csv.js";
import {
  MEAN_LINE_COLOR,
  PALETTE,
  type Series,
  axes,
  drawSeries,
  extent,
  legend,
  makeScales,
  padded,
  type Panel,
} from "./marks.js";
import { document as svgDocument, el, text } from "./svg.js";
import { type ProfileCurve, drawSurface } from "./surface.js";

const WIDTH = 720;
const HEIGHT = 430;

function panelGrid(count: number, width = WIDTH, height = HEIGHT): Panel[] {
  const cols = count <= 1 ? 1 : count <= 2 ? 2 : count <= 4 ? 2 : 3;
  const rows = Math.ceil(count / cols);
  const panels: Panel[] = [];
  const margin = { left: 55, right: 15, top: 30, bottom: 45 };
  const cellW = width / cols;
  const cellH = height / rows;
  for (let i = 0; i < count; i += 1) {
    const c = i % cols;
    const r = Math.floor(i / cols);
    panels.push({
      x0: c * cellW + margin.left,
      y0: r * cellH + margin.top,
      width: cellW - margin.left - margin.right,
      height: cellH - margin.top - margin.bottom,
    });
  }
  return panels;
}

function linesFigure(
  table: Table,
  opts: {
    x: string;
    y: string;
    seriesKey: (row: string[]) => string;
    meanColumns?: string[];
    xLabel: string;
    yLabel: string;
    title: string;
    referenceY?: number;
  },
): string {
  const getX = numericColumn(table, opts.x);
  const getY = numericColumn(table, opts.y);
  const groups = groupBy(
    table.rows.filter((r) => getY(r) === getY(r)), // drop NaN cells
    opts.seriesKey,
  );
  const series: Series[] = [...groups.entries()].map(([label, rows], i) => ({
    label,
    color: PALETTE[i % PALETTE.length],
    points: rows.map((r) => [getX(r), getY(r)] as [number, number]),
  }));
  const meanSeries: Series[] = [];
  for (const name of opts.meanColumns ?? []) {
    const getMean = numericColumn(table, name);
    const first = [...groups.values()][0];
    meanSeries.push({
      label: name,
      color: MEAN_LINE_COLOR,
      dashed: true,
      width: 1.2,
      points: first.map((r) => [getX(r), getMean(r)] as [number, number]),
    });
  }
  const all = [...series, ...meanSeries];
  const panel = panelGrid(1)[0];
  const xDomain = extent(all.flatMap((s) => s.points.map((p) => p[0])));
  const yValues = all.flatMap((s) => s.points.map((p) => p[1]));
  if (opts.referenceY !== undefined) yValues.push(opts.referenceY);
  const scales = makeScales(panel, xDomain, padded(extent(yValues)));
  const parts = [axes(panel, scales, opts.xLabel, opts.yLabel, opts.title)];
  if (opts.referenceY !== undefined) {
    parts.push(
      drawSeries(scales, {
        label: "pinned mean",
        color: MEAN_LINE_COLOR,
        dashed: true,
        width: 1.2,
        points: [
          [xDomain[0], opts.referenceY],
          [xDomain[1], opts.referenceY],
        ],
      }),
    );
  }
  for (const s of [...meanSeries, ...series]) parts.push(drawSeries(scales, s));
  parts.push(legend(all, panel.x0 + panel.width - 150, panel.y0 + 16));
  return svgDocument(WIDTH, HEIGHT, parts);
}

// --- fig3 / fig6: sweeps with the three dashed mean curves ------------------

export function renderFig3(tables: Table[]): string {
  const table = tables[0];
  requireColumns(table, ["v_star", "k1", "k2", "v_eff", "m_A", "m_G", "m_H"]);
  const k1 = column(table, "k1");
  const k2 = column(table, "k2");
  return linesFigure(table, {
    x: "v_star",
    y: "v_eff",
    seriesKey: (r) => `k1=${fmtNum(k1(r))}, k2=${fmtNum(k2(r))}`,
    meanColumns: ["m_A", "m_G", "m_H"],
    xLabel: "v*",
    yLabel: "effective trait",
    title: "Effective trait of a two-trait population (one trait fixed)",
  });
}

export function renderFig6(tables: Table[]): string {
  const table = tables[0];
  requireColumns(table, ["M", "kernel_id", "v_eff", "m_A", "m_G", "m_H"]);
  const kernel = column(table, "kernel_id");
  return linesFigure(table, {
    x: "M",
    y: "v_eff",
    seriesKey: kernel,
    meanColumns: ["m_A", "m_G", "m_H"],
    xLabel: "number of traits M",
    yLabel: "effective trait",
    title: "Effective trait vs number of traits (fixed trait interval)",
  });
}

// --- fig7 / fig8 / figS2: sigma sweeps ---------------------------------------

export function renderFig7(tables: Table[]): string {
  const table = tables[0];
  requireColumns(table, ["M", "alpha", "mean_kind", "sigma", "v_eff", "gamma"]);
  const kind = column(table, "mean_kind");
  const alpha = column(table, "alpha");
  const status = table.header.includes("status") ? column(table, "status") : null;
  const rows = table.rows.filter((r) => (status ? status(r) === "ok" : true));
  const kinds = [...groupBy(rows, kind).keys()];
  const panels = panelGrid(kinds.length);
  const getX = numericColumn(table, "sigma");
  const getY = numericColumn(table, "v_eff");
  const parts: string[] = [];
  kinds.forEach((kindName, i) => {
    const panel = panels[i];
    const subset = rows.filter((r) => kind(r) === kindName);
    const groups = groupBy(subset, (r) => `alpha=${fmtNum(alpha(r))}`);
    const series: Series[] = [...groups.entries()].map(([label, g], j) => ({
      label,
      color: PALETTE[j % PALETTE.length],
      points: g.map((r) => [getX(r), getY(r)] as [number, number]),
    }));
    const yValues = series.flatMap((s) => s.points.map((p) => p[1]));
    const scales = makeScales(
      panel,
      extent(subset.map(getX)),
      padded(extent(yValues)),
    );
    parts.push(axes(panel, scales, "trait range", "effective trait", kindName));
    // dashed reference at the pinned mean value (sigma = 0 limit)
    const pinned = series[0]?.points.find((p) => p[0] === 0)?.[1];
    if (pinned !== undefined) {
      parts.push(
        drawSeries(scales, {
          label: "pinned mean",
          color: MEAN_LINE_COLOR,
          dashed: true,
          width: 1.2,
          points: scales.sx.domain().map((x) => [x, pinned] as [number, number]),
        }),
      );
    }
    for (const s of series) parts.push(drawSeries(scales, s));
    if (i === 0) parts.push(legend(series, panel.x0 + 6, panel.y0 + 14));
  });
  return svgDocument(WIDTH, HEIGHT, parts);
}

export function renderFig8(tables: Table[]): string {
  const table = tables[0];
  requireColumns(table, ["M", "kernel_id", "alpha", "sigma", "v_eff", "gamma"]);
  const mCol = column(table, "M");
  const kernel = column(table, "kernel_id");
  const ms = [...groupBy(table.rows, mCol).keys()];
  const panels = panelGrid(ms.length);
  const getX = numericColumn(table, "sigma");
  const getY = numericColumn(table, "v_eff");
  const parts: string[] = [];
  ms.forEach((mValue, i) => {
    const panel = panels[i];
    const subset = table.rows.filter((r) => mCol(r) === mValue);
    const groups = groupBy(subset, kernel);
    const series: Series[] = [...groups.entries()].map(([label, g], j) => ({
      label,
      color: PALETTE[j % PALETTE.length],
      points: g.map((r) => [getX(r), getY(r)] as [number, number]),
    }));
    const pinned = series[0]?.points.find((p) => p[0] === 0)?.[1];
    const yValues = series.flatMap((s) => s.points.map((p) => p[1]));
    const scales = makeScales(
      panel,
      extent(subset.map(getX)),
      padded(extent(yValues)),
    );
    parts.push(
      axes(panel, scales, "trait range", "effective trait", `M = ${mValue}`),
    );
    if (pinned !== undefined) {
      parts.push(
        drawSeries(scales, {
          label: "neutral level",
          color: MEAN_LINE_COLOR,
          dashed: true,
          width: 1.2,
          points: scales.sx.domain().map((x) => [x, pinned] as [number, number]),
        }),
      );
    }
    for (const s of series) parts.push(drawSeries(scales, s));
    if (i === 0) parts.push(legend(series, panel.x0 + 6, panel.y0 + 14));
  });
  return svgDocument(WIDTH, HEIGHT, parts);
}

export function renderFigS2(tables: Table[]): string {
  const needed = [
    "mean_kind",
    "sigma",
    "alpha",
    "lambda",
    "v_eff_reported",
    "residual",
  ];
  for (const t of tables) requireColumns(t, needed);
  const panels = panelGrid(tables.length);
  const parts: string[] = [];
  tables.forEach((table, i) => {
    const alpha = column(table, "alpha");
    const getX = numericColumn(table, "sigma");
    const getY = numericColumn(table, "v_eff_reported");
    const converged = table.header.includes("converged")
      ? column(table, "converged")
      : null;
    const rows = table.rows.filter(
      (r) => (converged ? converged(r) === "1" : true) && getY(r) === getY(r),
    );
    if (rows.length === 0) return;
    const groups = groupBy(rows, (r) => `alpha=${fmtNum(alpha(r))}`);
    const series: Series[] = [...groups.entries()].map(([label, g], j) => ({
      label,
      color: PALETTE[j % PALETTE.length],
      points: g.map((r) => [getX(r), getY(r)] as [number, number]),
    }));
    const panel = panels[i];
    const pinned = series[0]?.points.find((p) => p[0] === 0)?.[1];
    const yValues = series.flatMap((s) => s.points.map((p) => p[1]));
    const scales = makeScales(
      panel,
      extent(rows.map(getX)),
      padded(extent(yValues)),
    );
    const betaComment =
      table.comments.find((c) => c.startsWith("beta=")) ?? "beta=?";
    parts.push(
      axes(
        panel,
        scales,
        "trait range",
        "effective trait (= growth rate)",
        `equal mitosis, linear growth, ${betaComment}`,
      ),
    );
    if (pinned !== undefined) {
      parts.push(
        drawSeries(scales, {
          label: "pinned mean",
          color: MEAN_LINE_COLOR,
          dashed: true,
          width: 1.2,
          points: scales.sx.domain().map((x) => [x, pinned] as [number, number]),
        }),
      );
    }
    for (const s of series) parts.push(drawSeries(scales, s));
    if (i === 0) parts.push(legend(series, panel.x0 + 6, panel.y0 + 14));
  });
  return svgDocument(WIDTH, HEIGHT, parts);
}

// --- fig5: heatmap -----------------------------------------------------------

export function renderFig5(tables: Table[]): string {
  const table = tables[0];
  requireColumns(table, ["k1", "k2", "v_eff"]);
  const getK1 = numericColumn(table, "k1");
  const getK2 = numericColumn(table, "k2");
  const getV = numericColumn(table, "v_eff");
  const k1s = [...new Set(table.rows.map(getK1))].sort((a, b) => a - b);
  const k2s = [...new Set(table.rows.map(getK2))].sort((a, b) => a - b);
  const [vLo, vHi] = extent(table.rows.map(getV));
  const panel = panelGrid(1)[0];
  const scales = makeScales(panel, extent(k1s), extent(k2s));
  const cellW = panel.width / k1s.length;
  const cellH = panel.height / k2s.length;
  const colorOf = (v: number) => interpolateViridis((v - vLo) / (vHi - vLo));
  const parts: string[] = [];
  for (const row of table.rows) {
    const x = scales.sx(getK1(row)) - cellW / 2;
    const y = scales.sy(getK2(row)) - cellH / 2;
    parts.push(
      el("rect", {
        x,
        y,
        width: cellW + 0.5,
        height: cellH + 0.5,
        fill: colorOf(getV(row)),
      }),
    );
  }
  parts.push(
    axes(panel, scales, "k1", "k2", "Effective trait over the heredity kernel"),
  );
  // color bar
  const barX = panel.x0 + panel.width + 18;
  const steps = 60;
  const barScale = scaleLinear()
    .domain([0, steps])
    .range([panel.y0 + panel.height, panel.y0]);
  for (let i = 0; i < steps; i += 1) {
    parts.push(
      el("rect", {
        x: barX,
        y: barScale(i + 1),
        width: 12,
        height: (panel.height / steps) + 0.5,
        fill: interpolateViridis(i / (steps - 1)),
      }),
    );
  }
  parts.push(
    text(fmtNum(String(vLo)), {
      x: barX + 16,
      y: panel.y0 + panel.height,
      "font-size": 10,
      fill: "#111111",
    }),
    text(fmtNum(String(vHi)), {
      x: barX + 16,
      y: panel.y0 + 8,
      "font-size": 10,
      fill: "#111111",
    }),
  );
  return svgDocument(WIDTH, HEIGHT, parts);
}

// --- fig2: overlaid profiles --------------------------------------------------

export function renderFig2(tables: Table[]): string {
  const table = tables[0];
  requireColumns(table, ["series", "x", "N"]);
  const seriesCol = column(table, "series");
  return linesFigure(table, {
    x: "x",
    y: "N",
    seriesKey: seriesCol,
    xLabel: "size",
    yLabel: "density (unit mass each)",
    title: "Per-type, homogeneous and mass-weighted-mean profiles",
  });
}

// --- fig4 / figS1: profile surfaces ------------------------------------------

function surfacePanels(
  table: Table,
  panelKey: (row: string[]) => string,
  depthLabelOf: (panelName: string) => string,
): string {
  const getX = numericColumn(table, "x");
  const getN = numericColumn(table, "N");
  const getSweep = numericColumn(table, "sweep_param");
  const typeCol = column(table, "type");
  const byPanel = groupBy(table.rows, panelKey);
  const panels = panelGrid(byPanel.size);
  const parts: string[] = [];
  [...byPanel.entries()].forEach(([panelName, rows], i) => {
    const curves: ProfileCurve[] = [];
    const byTypeSweep = groupBy(rows, (r) => `${typeCol(r)}|${getSweep(r)}`);
    for (const [key, group] of byTypeSweep.entries()) {
      const [typeName] = key.split("|");
      const typeIdx = Number(typeName) - 1;
      curves.push({
        depth: getSweep(group[0]),
        label: key,
        color: PALETTE[typeIdx % PALETTE.length],
        xs: group.map(getX),
        ys: group.map(getN),
      });
    }
    parts.push(
      drawSurface(
        panels[i],
        curves,
        "size",
        depthLabelOf(panelName),
        panelName,
      ),
    );
  });
  return svgDocument(WIDTH, HEIGHT, parts);
}

export function renderFig4(tables: Table[]): string {
  const table = tables[0];
  requireColumns(table, ["sweep_id", "sweep_param", "type", "x", "N", "mass"]);
  const sweepId = column(table, "sweep_id");
  return surfacePanels(table, sweepId, () => "k1");
}

export function renderFigS1(tables: Table[]): string {
  const table = tables[0];
  requireColumns(table, ["panel", "sweep_param", "type", "x", "N", "mass"]);
  const panel = column(table, "panel");
  return surfacePanels(table, panel, (name) =>
    name.startsWith("k1=") ? "k2" : "k1",
  );
}

function fmtNum(cell: string): string {
  const v = Number(cell);
  if (!Number.isFinite(v)) return cell;
  return String(Math.round(v * 10000) / 10000);
}
