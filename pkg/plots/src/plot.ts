/** Figure assembly: diagnostics runs in, standalone SVG documents out. */

import fs from "node:fs";
import path from "node:path";

import { DiagRun, parseDiagnosticsCsv } from "./csv.js";
import { FitWindow, fitLogSlope } from "./fit.js";
import { PALETTE, Series, composeSvg, renderPanel } from "./svg.js";

const W = 640;
const H = 330;

function tag(runs: DiagRun[], label: string, name: string): string {
  return runs.length > 1 ? `${label}: ${name}` : name;
}

export function energySvg(runs: DiagRun[], fitWindow?: FitWindow): string {
  const linear: Series[] = [];
  const logE: Series[] = [];
  const annotations: string[] = [];
  runs.forEach((run, i) => {
    const t = run.rows.map((r) => r.t);
    const base = PALETTE[(3 * i) % PALETTE.length];
    linear.push(
      { label: tag(runs, run.label, "e_kin"), x: t, y: run.rows.map((r) => r.eKin), color: PALETTE[(3 * i) % PALETTE.length] },
      { label: tag(runs, run.label, "e_ele"), x: t, y: run.rows.map((r) => r.eEle), color: PALETTE[(3 * i + 1) % PALETTE.length] },
      { label: tag(runs, run.label, "e_tot"), x: t, y: run.rows.map((r) => r.eTot), color: PALETTE[(3 * i + 2) % PALETTE.length] },
    );
    const ee = run.rows.map((r) => r.eEle);
    logE.push({ label: tag(runs, run.label, "e_ele"), x: t, y: ee, color: base });
    try {
      const fit = fitLogSlope(t, ee, fitWindow);
      const ty = (x: number) => Math.exp(fit.intercept + fit.slope * x);
      logE.push({
        label: `fit ${fit.slope.toFixed(4)}`,
        x: [fit.window.t0, fit.window.t1],
        y: [ty(fit.window.t0), ty(fit.window.t1)],
        color: base,
        dash: "6 3",
      });
      annotations.push(
        `${run.label}: slope ${fit.slope.toFixed(4)} on ` +
          `[${fit.window.t0.toPrecision(3)}, ${fit.window.t1.toPrecision(3)}]`,
      );
    } catch {
      annotations.push(`${run.label}: no fit (no positive energy in window)`);
    }
  });
  return composeSvg([
    {
      content: renderPanel(linear, {
        title: "energies", xLabel: "t", yLabel: "energy", width: W, height: H,
      }),
      width: W,
      height: H,
    },
    {
      content: renderPanel(logE, {
        title: "electric energy (log)", xLabel: "t", yLabel: "e_ele",
        yScale: "log", width: W, height: H, annotations,
      }),
      width: W,
      height: H,
    },
  ]);
}

export function rankSvg(runs: DiagRun[]): string {
  const series: Series[] = runs.map((run, i) => ({
    label: run.label,
    x: run.rows.map((r) => r.t),
    y: run.rows.map((r) => r.rank),
    color: PALETTE[i % PALETTE.length],
    step: true,
  }));
  return composeSvg([
    {
      content: renderPanel(series, {
        title: "rank history", xLabel: "t", yLabel: "rank", width: W, height: H,
      }),
      width: W,
      height: H,
    },
  ]);
}

export function spectrumSvg(runs: DiagRun[]): string {
  const series: Series[] = [];
  runs.forEach((run, i) => {
    const color = PALETTE[i % PALETTE.length];
    const first = run.rows[0];
    const last = run.rows[run.rows.length - 1];
    if (first !== undefined && run.rows.length > 1) {
      series.push({
        label: `${run.label} t=${first.t}`,
        x: first.sv.map((_, j) => j + 1),
        y: first.sv.slice(),
        color,
        dash: "5 4",
      });
    }
    if (last !== undefined) {
      series.push({
        label: `${run.label} t=${last.t}`,
        x: last.sv.map((_, j) => j + 1),
        y: last.sv.slice(),
        color,
      });
    }
  });
  return composeSvg([
    {
      content: renderPanel(series, {
        title: "singular value spectrum", xLabel: "index", yLabel: "sigma",
        yScale: "log", width: W, height: H,
      }),
      width: W,
      height: H,
    },
  ]);
}

export type Which = "energy" | "rank" | "spectrum" | "all";

export interface PlotRunOptions {
  csv: string[];
  out: string;
  which?: Which;
  fitWindow?: FitWindow;
}

/** Read the CSVs, render the requested figures, return the files written. */
export function plot_run(opts: PlotRunOptions): string[] {
  if (opts.csv.length === 0) {
    throw new Error("no input CSVs");
  }
  const runs = opts.csv.map((file) =>
    parseDiagnosticsCsv(fs.readFileSync(file, "utf-8"), path.basename(file, ".csv")),
  );
  const which = opts.which ?? "all";
  fs.mkdirSync(opts.out, { recursive: true });

  const written: string[] = [];
  const emit = (name: string, svg: string) => {
    const file = path.join(opts.out, name);
    fs.writeFileSync(file, svg);
    written.push(file);
  };
  if (which === "energy" || which === "all") {
    emit("energy.svg", energySvg(runs, opts.fitWindow));
  }
  if (which === "rank" || which === "all") {
    emit("rank.svg", rankSvg(runs));
  }
  if (which === "spectrum" || which === "all") {
    emit("spectrum.svg", spectrumSvg(runs));
  }
  return written;
}
