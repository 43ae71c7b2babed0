/**
 * Small hand-rolled SVG panel renderer: enough axes, ticks, polylines
 * and legends for diagnostics plots, no DOM and no dependencies.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color?: string;
  /** SVG dash pattern, e.g. "6 3" for fitted overlays */
  dash?: string;
  /** draw as a staircase (rank histories) */
  step?: boolean;
}

export interface PanelOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  yScale?: "linear" | "log";
  width?: number;
  height?: number;
  /** text lines drawn inside the top-right corner of the plot area */
  annotations?: string[];
}

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
  "#17becf", "#e377c2",
];

const MARGIN = { left: 68, right: 16, top: 30, bottom: 44 };

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmtTick(x: number): string {
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 1e4 || a < 1e-3) {
    return x.toExponential(0).replace("e+", "e").replace("e-", "e-");
  }
  // strip trailing zeros without losing up to 6 significant digits
  return String(Number(x.toPrecision(6)));
}

/** ~n ticks on a 1/2/5 progression covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let k = Math.ceil(lo / step - 1e-9); k * step <= hi + 1e-9 * step; k++) {
    // k * step accumulates binary noise (3 * 0.2 = 0.6000...01); snap it
    ticks.push(k === 0 ? 0 : Number((k * step).toPrecision(12)));
  }
  return ticks;
}

/** decade ticks for a log axis (values, not exponents) */
export function decadeTicks(lo: number, hi: number): number[] {
  const e0 = Math.ceil(Math.log10(lo) - 1e-12);
  const e1 = Math.floor(Math.log10(hi) + 1e-12);
  const ticks: number[] = [];
  const stride = Math.max(1, Math.ceil((e1 - e0) / 8));
  for (let e = e0; e <= e1; e += stride) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [lo];
}

interface Extent {
  lo: number;
  hi: number;
}

function dataExtent(vals: number[], logOnly: boolean): Extent | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of vals) {
    if (!Number.isFinite(v) || (logOnly && v <= 0)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) return null;
  if (lo === hi) {
    // widen a degenerate extent so the scale stays invertible
    const pad = logOnly ? lo * 0.5 : Math.max(Math.abs(lo) * 0.05, 1);
    return { lo: lo - (logOnly ? pad : pad), hi: hi + pad };
  }
  return { lo, hi };
}

/**
 * Render one panel as a translated `<g>` of the given size. Series with
 * no drawable points still appear in the legend; a panel with no data
 * at all gets bare axes and a "no data" note.
 */
export function renderPanel(series: Series[], opts: PanelOptions): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 330;
  const yScale = opts.yScale ?? "linear";
  const pw = width - MARGIN.left - MARGIN.right;
  const ph = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  const xe = dataExtent(xs, false) ?? { lo: 0, hi: 1 };
  const ye = dataExtent(ys, yScale === "log") ??
    (yScale === "log" ? { lo: 1e-1, hi: 1e1 } : { lo: 0, hi: 1 });

  const sx = (x: number) => MARGIN.left + ((x - xe.lo) / (xe.hi - xe.lo)) * pw;
  const sy =
    yScale === "log"
      ? (y: number) =>
          MARGIN.top + ph -
          ((Math.log10(y) - Math.log10(ye.lo)) /
            (Math.log10(ye.hi) - Math.log10(ye.lo))) * ph
      : (y: number) => MARGIN.top + ph - ((y - ye.lo) / (ye.hi - ye.lo)) * ph;

  const parts: string[] = [];
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${pw}" height="${ph}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`,
  );

  const xTicks = niceTicks(xe.lo, xe.hi, 6);
  for (const v of xTicks) {
    const px = sx(v);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${MARGIN.top + ph}" x2="${px.toFixed(2)}" ` +
        `y2="${MARGIN.top + ph + 5}" stroke="#333"/>`,
      `<text x="${px.toFixed(2)}" y="${MARGIN.top + ph + 18}" font-size="11" ` +
        `text-anchor="middle" fill="#333">${fmtTick(v)}</text>`,
    );
  }
  const yTicks = yScale === "log" ? decadeTicks(ye.lo, ye.hi) : niceTicks(ye.lo, ye.hi, 5);
  for (const v of yTicks) {
    const py = sy(v);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${py.toFixed(2)}" x2="${MARGIN.left}" ` +
        `y2="${py.toFixed(2)}" stroke="#333"/>`,
      `<text x="${MARGIN.left - 8}" y="${(py + 4).toFixed(2)}" font-size="11" ` +
        `text-anchor="end" fill="#333">${fmtTick(v)}</text>`,
      `<line x1="${MARGIN.left}" y1="${py.toFixed(2)}" x2="${MARGIN.left + pw}" ` +
        `y2="${py.toFixed(2)}" stroke="#ddd" stroke-width="0.5"/>`,
    );
  }

  let drewAnything = false;
  series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length];
    const cmds: string[] = [];
    let pen = false;
    const put = (x: number, y: number) => {
      const ok =
        Number.isFinite(x) && Number.isFinite(y) && (yScale !== "log" || y > 0);
      if (!ok) {
        pen = false; // break the line across unplottable points
        return;
      }
      cmds.push(`${pen ? "L" : "M"}${sx(x).toFixed(2)},${sy(y).toFixed(2)}`);
      pen = true;
    };
    for (let j = 0; j < s.x.length; j++) {
      if (s.step && j > 0) {
        put(s.x[j], s.y[j - 1]);
      }
      put(s.x[j], s.y[j]);
    }
    if (cmds.length > 0) {
      drewAnything = true;
      const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
      parts.push(
        `<path d="${cmds.join(" ")}" fill="none" stroke="${color}" ` +
          `stroke-width="1.5"${dash}/>`,
      );
    }
  });

  // legend in the top-left of the plot area
  series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length];
    const ly = MARGIN.top + 14 + 15 * i;
    parts.push(
      `<line x1="${MARGIN.left + 8}" y1="${ly - 4}" x2="${MARGIN.left + 26}" ` +
        `y2="${ly - 4}" stroke="${color}" stroke-width="2"` +
        (s.dash ? ` stroke-dasharray="${s.dash}"` : "") + `/>`,
      `<text x="${MARGIN.left + 31}" y="${ly}" font-size="11" fill="#333">` +
        `${escapeXml(s.label)}</text>`,
    );
  });

  (opts.annotations ?? []).forEach((line, i) => {
    parts.push(
      `<text x="${MARGIN.left + pw - 6}" y="${MARGIN.top + 14 + 15 * i}" ` +
        `font-size="11" text-anchor="end" fill="#555">${escapeXml(line)}</text>`,
    );
  });
  if (!drewAnything) {
    parts.push(
      `<text x="${MARGIN.left + pw / 2}" y="${MARGIN.top + ph / 2}" ` +
        `font-size="12" text-anchor="middle" fill="#999">no data</text>`,
    );
  }

  parts.push(
    `<text x="${width / 2}" y="18" font-size="13" font-weight="bold" ` +
      `text-anchor="middle" fill="#111">${escapeXml(opts.title)}</text>`,
    `<text x="${MARGIN.left + pw / 2}" y="${height - 10}" font-size="12" ` +
      `text-anchor="middle" fill="#333">${escapeXml(opts.xLabel)}</text>`,
    `<text x="16" y="${MARGIN.top + ph / 2}" font-size="12" text-anchor="middle" ` +
      `fill="#333" transform="rotate(-90 16 ${MARGIN.top + ph / 2})">` +
      `${escapeXml(opts.yLabel)}</text>`,
  );
  return parts.join("\n");
}

/** Stack pre-rendered panels of the given sizes into one SVG document. */
export function composeSvg(panels: { content: string; width: number; height: number }[]): string {
  const width = Math.max(...panels.map((p) => p.width), 1);
  let y = 0;
  const groups: string[] = [];
  for (const p of panels) {
    groups.push(`<g transform="translate(0 ${y})" font-family="sans-serif">\n${p.content}\n</g>`);
    y += p.height;
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${y}" ` +
    `viewBox="0 0 ${width} ${y}">\n` +
    `<rect width="${width}" height="${y}" fill="white"/>\n` +
    groups.join("\n") +
    `\n</svg>\n`
  );
}
