#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { parseWindow } from "./fit.js";
import { Which, plot_run } from "./plot.js";

const argv = yargs(hideBin(process.argv))
  .usage("plot_run --csv diagnostics.csv [--csv other.csv ...] --out dir")
  .option("csv", {
    type: "string",
    array: true,
    demandOption: true,
    describe: "diagnostics CSV written by 'kinlr run' (repeat to overlay)",
  })
  .option("out", {
    type: "string",
    default: "out",
    describe: "output directory for the SVGs",
  })
  .option("which", {
    choices: ["energy", "rank", "spectrum", "all"] as const,
    default: "all" as Which,
    describe: "which figure(s) to write",
  })
  .option("fit-window", {
    type: "string",
    describe: "t0:t1 window for the damping-rate fit (default: central 60%)",
  })
  .strict()
  .parseSync();

try {
  const written = plot_run({
    csv: argv.csv,
    out: argv.out,
    which: argv.which as Which,
    fitWindow: argv["fit-window"] ? parseWindow(argv["fit-window"]) : undefined,
  });
  for (const file of written) {
    console.log(`wrote ${file}`);
  }
} catch (err) {
  console.error(`plot_run: error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
