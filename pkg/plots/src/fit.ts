/** Least-squares slope of log(y) against t, for damping/growth rates. */

export interface FitWindow {
  t0: number;
  t1: number;
}

export interface FitResult {
  slope: number;
  intercept: number;
  window: FitWindow;
  /** points that actually entered the fit (positive y inside the window) */
  count: number;
}

/** Central 60% of the time span, skipping start-up and tail transients. */
export function defaultWindow(t: number[]): FitWindow {
  const lo = Math.min(...t);
  const hi = Math.max(...t);
  const span = hi - lo;
  return { t0: lo + 0.2 * span, t1: hi - 0.2 * span };
}

export function fitLogSlope(t: number[], y: number[], window?: FitWindow): FitResult {
  if (t.length !== y.length) {
    throw new Error(`fit: ${t.length} times vs ${y.length} values`);
  }
  const w = window ?? defaultWindow(t);
  const ts: number[] = [];
  const ls: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (t[i] >= w.t0 && t[i] <= w.t1 && y[i] > 0) {
      ts.push(t[i]);
      ls.push(Math.log(y[i]));
    }
  }
  if (ts.length < 2) {
    throw new Error(`fit: only ${ts.length} usable points in [${w.t0}, ${w.t1}]`);
  }
  const n = ts.length;
  const mt = ts.reduce((a, b) => a + b, 0) / n;
  const ml = ls.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (ts[i] - mt) * (ts[i] - mt);
    sxy += (ts[i] - mt) * (ls[i] - ml);
  }
  if (sxx === 0) {
    throw new Error("fit: all points share one time");
  }
  const slope = sxy / sxx;
  return { slope, intercept: ml - slope * mt, window: w, count: n };
}

/** Parse a `t0:t1` command-line window. */
export function parseWindow(spec: string): FitWindow {
  const m = /^([^:]+):([^:]+)$/.exec(spec);
  if (!m) {
    throw new Error(`bad fit window '${spec}', expected t0:t1`);
  }
  const t0 = Number(m[1]);
  const t1 = Number(m[2]);
  if (!Number.isFinite(t0) || !Number.isFinite(t1) || t1 <= t0) {
    throw new Error(`bad fit window '${spec}', need numbers with t1 > t0`);
  }
  return { t0, t1 };
}
