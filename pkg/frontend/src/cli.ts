#!/usr/bin/env node
/** render_figures --in DIR [--which fig3,fig5,...] [--out DIR]
 *                 [--format vector|raster]
 *
 * Consumes the CSV datasets written by the effgrow CLI and emits one image
 * per requested figure. Schema problems abort with a column-level message.
 */

import { SchemaError } from "./csv.js";
import { FIGURE_IDS, type Format, makeRecipe } from "./recipes.js";
import { render } from "./render.js";

interface Args {
  inDir: string;
  outDir: string;
  which: string[];
  format: Format;
}

function parseArgs(argv: string[]): Args {
  let inDir: string | null = null;
  let outDir = "figures";
  let which: string[] = FIGURE_IDS;
  let format: Format = "vector";
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new SchemaError(`${arg} needs a value`);
      return argv[i];
    };
    if (arg === "--in") inDir = next();
    else if (arg === "--out") outDir = next();
    else if (arg === "--which") {
      which = next().split(",").map((s) => s.trim()).filter((s) => s.length);
    } else if (arg === "--format") {
      const value = next();
      if (value !== "vector" && value !== "raster") {
        throw new SchemaError(`--format must be vector or raster, got ${value}`);
      }
      format = value;
    } else if (arg === "--help" || arg === "-h") {
      console.log(
        "render_figures --in DIR [--which " +
          FIGURE_IDS.join(",") +
          "] [--out DIR] [--format vector|raster]",
      );
      process.exit(0);
    } else {
      throw new SchemaError(`unknown argument ${arg}`);
    }
  }
  if (!inDir) throw new SchemaError("--in DIR is required");
  return { inDir, outDir, which, format };
}

async function main(): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  let failures = 0;
  for (const id of args.which) {
    try {
      const recipe = makeRecipe(id, args.inDir, args.outDir, args.format);
      const path = await render(recipe);
      console.log(`${id}: ${path}`);
    } catch (err) {
      console.error(`${id}: error: ${(err as Error).message}`);
      failures += 1;
    }
  }
  return failures === 0 ? 0 : 1;
}

main().then((code) => {
  process.exitCode = code;
});
