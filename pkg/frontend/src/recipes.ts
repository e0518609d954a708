/** Figure registry: which CSVs each figure consumes and how it renders. */

import { existsSync } from "fs";
import { join } from "path";

import { readTable, SchemaError, type Table } from "./csv.js";
import {
  renderFig2,
  renderFig3,
  renderFig4,
  renderFig5,
  renderFig6,
  renderFig7,
  renderFig8,
  renderFigS1,
  renderFigS2,
} from "./figures.js";

export type Format = "vector" | "raster";

export interface FigureRecipe {
  id: string;
  inputs: string[]; // CSV paths, resolved
  output: string; // image path
  format: Format;
}

interface FigureSpec {
  /** file names, looked up under <in>/<experiment>/ then <in>/ */
  files: Array<{ experiment: string; name: string }>;
  render: (tables: Table[]) => string;
}

export const FIGURES: Record<string, FigureSpec> = {
  fig2: {
    files: [{ experiment: "fig2", name: "fig2_profiles.csv" }],
    render: renderFig2,
  },
  fig3: { files: [{ experiment: "fig3", name: "fig3.csv" }], render: renderFig3 },
  fig4: { files: [{ experiment: "fig4", name: "fig4.csv" }], render: renderFig4 },
  fig5: {
    files: [{ experiment: "fig5_heatmap", name: "fig5_heatmap.csv" }],
    render: renderFig5,
  },
  fig6: {
    files: [{ experiment: "fig6_Mconvergence", name: "fig6.csv" }],
    render: renderFig6,
  },
  fig7: {
    files: [{ experiment: "fig7_sigma_alpha", name: "fig7.csv" }],
    render: renderFig7,
  },
  fig8: {
    files: [{ experiment: "fig8_neutrality", name: "fig8.csv" }],
    render: renderFig8,
  },
  figS1: {
    files: [{ experiment: "figS1_fractions", name: "figS1.csv" }],
    render: renderFigS1,
  },
  figS2: {
    files: [
      { experiment: "figS2_mitosis", name: "figS2_beta_const.csv" },
      { experiment: "figS2_mitosis", name: "figS2_beta_linear.csv" },
    ],
    render: renderFigS2,
  },
};

export const FIGURE_IDS = Object.keys(FIGURES);

export function resolveInputs(figureId: string, inDir: string): string[] {
  const spec = FIGURES[figureId];
  if (!spec) {
    throw new SchemaError(
      `unknown figure ${figureId}; choose from ${FIGURE_IDS.join(", ")}`,
    );
  }
  const paths: string[] = [];
  for (const file of spec.files) {
    const nested = join(inDir, file.experiment, file.name);
    const flat = join(inDir, file.name);
    if (existsSync(nested)) paths.push(nested);
    else if (existsSync(flat)) paths.push(flat);
    else {
      throw new SchemaError(
        `missing input for ${figureId}: neither ${nested} nor ${flat} exists`,
      );
    }
  }
  return paths;
}

export function makeRecipe(
  figureId: string,
  inDir: string,
  outDir: string,
  format: Format,
): FigureRecipe {
  const ext = format === "vector" ? "svg" : "png";
  return {
    id: figureId,
    inputs: resolveInputs(figureId, inDir),
    output: join(outDir, `${figureId}.${ext}`),
    format,
  };
}

export function renderToSvg(recipe: FigureRecipe): string {
  const tables = recipe.inputs.map((p) => readTable(p));
  return FIGURES[recipe.id].render(tables);
}
