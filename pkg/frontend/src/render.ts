/** Render a recipe to disk: SVG for vector, PNG (via resvg) for raster. */

import { mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";

import { type FigureRecipe, renderToSvg } from "./recipes.js";

export async function render(recipe: FigureRecipe): Promise<string> {
  const svg = renderToSvg(recipe);
  mkdirSync(dirname(recipe.output), { recursive: true });
  if (recipe.format === "vector") {
    writeFileSync(recipe.output, svg);
    return recipe.output;
  }
  const { Resvg } = await import("@resvg/resvg-js");
  const png = new Resvg(svg, {
    fitTo: { mode: "width", value: 1440 },
  }).render();
  writeFileSync(recipe.output, png.asPng());
  return recipe.output;
}
