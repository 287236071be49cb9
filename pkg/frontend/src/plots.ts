/**
 * Figure kinds for the simulator's CSV outputs.
 *
 * Every renderer validates the input header against the documented column
 * contract (aborting with the differing column named), builds a
 * deterministic SVG string, and returns any quantitative summary it
 * computed so callers and tests can assert against it.
 */

import { CsvTable, column, requireSchema } from "./csv.js";
import { tailSlope } from "./fit.js";
import { SvgCanvas, colormap, extent, linearScale } from "./svg.js";

export type FigureKind = "density-map" | "energy-growth" | "window-scan" | "peak-profile";

export const SCHEMAS: Record<FigureKind, string[]> = {
  "density-map": ["t", "x", "T00"],
  "energy-growth": ["n", "t", "E", "log_E"],
  "window-scan": ["domega_over_omega", "unstable", "bound"],
  "peak-profile": ["eps", "predicted", "exact"],
};

const W = 720;
const H = 480;
const MARGIN = { left: 70, right: 30, top: 30, bottom: 50 };

function frame(): { canvas: SvgCanvas; x: [number, number]; y: [number, number] } {
  return {
    canvas: new SvgCanvas(W, H),
    x: [MARGIN.left, W - MARGIN.right],
    y: [H - MARGIN.bottom, MARGIN.top],
  };
}

// -- density map --------------------------------------------------------------

export interface RidgeSummary {
  /** local maxima per snapshot (one entry per distinct t) */
  maximaPerSnapshot: number[];
  /** matched peak displacements classified by sign over snapshot pairs */
  rightMoving: number;
  leftMoving: number;
  /** distinct ridge passes (contiguous same-direction tracks) */
  rightPasses: number;
  leftPasses: number;
}

interface Snapshot {
  t: number;
  xs: number[];
  vals: number[];
}

function snapshots(table: CsvTable): Snapshot[] {
  const t = column(table, "t");
  const x = column(table, "x");
  const v = column(table, "T00");
  const snaps: Snapshot[] = [];
  let cur: Snapshot | null = null;
  for (let i = 0; i < table.rows; i++) {
    if (cur === null || t[i] !== cur.t) {
      cur = { t: t[i], xs: [], vals: [] };
      snaps.push(cur);
    }
    cur.xs.push(x[i]);
    cur.vals.push(v[i]);
  }
  return snaps;
}

function localMaxima(xs: number[], vals: number[], relThreshold = 0.05): number[] {
  let top = -Infinity;
  for (const v of vals) top = Math.max(top, v);
  const floor = relThreshold * top;
  const out: number[] = [];
  const n = vals.length;
  // boundary extrema count: a reflecting peak sits exactly at a wall
  if (n >= 2 && vals[0] > vals[1] && vals[0] > floor) out.push(xs[0]);
  for (let i = 1; i + 1 < n; i++) {
    if (vals[i] > vals[i - 1] && vals[i] > vals[i + 1] && vals[i] > floor) {
      out.push(xs[i]);
    }
  }
  if (n >= 2 && vals[n - 1] > vals[n - 2] && vals[n - 1] > floor) out.push(xs[n - 1]);
  return out;
}

/**
 * Classify ridge motion between consecutive snapshots.  Peaks travel at
 * the speed of light (1 in these units), so a maximum at x continues a
 * ridge from the previous snapshot at x -/+ dt.  Ridge passes are counted
 * by integrated visibility: one full traverse of the cavity contributes
 * exactly (x-span) worth of matched displacement, which is robust against
 * frames where crossing peaks merge into a single maximum.
 */
export function detectRidges(table: CsvTable): RidgeSummary {
  const snaps = snapshots(table);
  const counts = snaps.map((s) => localMaxima(s.xs, s.vals).length);
  const [xLo, xHi] = extent(column(table, "x"));
  const span = xHi - xLo;
  let right = 0;
  let left = 0;
  let rightTime = 0;
  let leftTime = 0;
  for (let i = 1; i < snaps.length; i++) {
    const dt = snaps[i].t - snaps[i - 1].t;
    const prev = localMaxima(snaps[i - 1].xs, snaps[i - 1].vals);
    const curr = localMaxima(snaps[i].xs, snaps[i].vals);
    const tol = 0.35 * dt + 0.02;
    for (const xc of curr) {
      for (const xp of prev) {
        const d = xc - xp;
        if (Math.abs(d - dt) < tol) {
          right += 1;
          rightTime += dt;
        } else if (Math.abs(d + dt) < tol) {
          left += 1;
          leftTime += dt;
        }
      }
    }
  }
  return {
    maximaPerSnapshot: counts,
    rightMoving: right,
    leftMoving: left,
    rightPasses: Math.round(rightTime / span),
    leftPasses: Math.round(leftTime / span),
  };
}

export function renderDensityMap(table: CsvTable): { svg: string; ridges: RidgeSummary } {
  requireSchema(table, "density-map", SCHEMAS["density-map"]);
  const snaps = snapshots(table);
  const { canvas, x: xr, y: yr } = frame();
  const tExtent = extent(snaps.map((s) => s.t));
  const xExtent = extent(column(table, "x"));
  const vExtent = extent(column(table, "T00"));
  const xs = linearScale(tExtent, xr);
  const ys = linearScale(xExtent, yr);
  const dt = snaps.length > 1 ? snaps[1].t - snaps[0].t : 1;
  for (const snap of snaps) {
    for (let i = 0; i < snap.xs.length; i++) {
      const dx = i + 1 < snap.xs.length ? snap.xs[i + 1] - snap.xs[i] : snap.xs[i] - snap.xs[i - 1];
      const u = (snap.vals[i] - vExtent[0]) / (vExtent[1] - vExtent[0]);
      canvas.rect(
        xs(snap.t - dt / 2),
        ys(snap.xs[i] + dx / 2),
        Math.abs(xs(snap.t + dt / 2) - xs(snap.t - dt / 2)) + 0.5,
        Math.abs(ys(snap.xs[i]) - ys(snap.xs[i] + dx)) + 0.5,
        colormap(u),
      );
    }
  }
  const ridges = detectRidges(table);
  for (const snap of snaps) {
    for (const xm of localMaxima(snap.xs, snap.vals)) {
      canvas.circle(xs(snap.t), ys(xm), 1.6, "#ff3333");
    }
  }
  canvas.axes(xs, ys, "t / L", "x / L");
  canvas.text(
    xr[0] + 6,
    yr[1] + 14,
    `ridge passes: ${ridges.rightPasses} right, ${ridges.leftPasses} left`,
    { size: 12 },
  );
  return { svg: canvas.render(), ridges };
}

// -- energy growth -------------------------------------------------------------

export interface EnergyGrowthSummary {
  fittedSlope: number;
  metaFittedSlope: number | null;
  analyticLogD1: number | null;
  analyticTwoLogD1: number | null;
  lines: string[];
}

export function renderEnergyGrowth(table: CsvTable): { svg: string; summary: EnergyGrowthSummary } {
  requireSchema(table, "energy-growth", SCHEMAS["energy-growth"]);
  const n = column(table, "n");
  const logE = column(table, "log_E");
  const fit = tailSlope(n, logE, 0.5);
  const { canvas, x: xr, y: yr } = frame();
  const xs = linearScale(extent(n), xr);
  const ys = linearScale(extent(logE), yr);
  canvas.polyline(
    n.map((v, i) => [xs(v), ys(logE[i])] as [number, number]),
    "#1f6fb2",
  );
  // fitted line over the tail window
  const start = n[Math.floor(n.length / 2)];
  const end = n[n.length - 1];
  canvas.polyline(
    [
      [xs(start), ys(fit.intercept + fit.slope * start)],
      [xs(end), ys(fit.intercept + fit.slope * end)],
    ],
    "#d62728",
    1.2,
  );
  canvas.axes(xs, ys, "period count n", "log E");

  const meta = table.meta;
  const metaSlope = meta["fitted_slope"] !== undefined ? Number(meta["fitted_slope"]) : null;
  const logD1 = meta["analytic_log_D1"] !== undefined ? Number(meta["analytic_log_D1"]) : null;
  const twoLogD1 =
    meta["analytic_two_log_D1"] !== undefined ? Number(meta["analytic_two_log_D1"]) : null;
  const lines = [`fitted slope (last half): ${fit.slope.toPrecision(8)}`];
  if (metaSlope !== null) {
    lines.push(`producer fitted_slope:     ${metaSlope.toPrecision(8)}`);
  }
  if (twoLogD1 !== null && logD1 !== null) {
    lines.push(
      `analytic 2*log D1:         ${twoLogD1.toPrecision(8)} ` +
        `(slope/2logD1 = ${(fit.slope / twoLogD1).toPrecision(6)})`,
    );
    lines.push(
      `analytic log D1:           ${logD1.toPrecision(8)} ` +
        `(slope/logD1 = ${(fit.slope / logD1).toPrecision(6)})`,
    );
  }
  canvas.text(xr[0] + 6, yr[1] + 14, lines[0], { size: 12 });
  if (lines.length > 2) canvas.text(xr[0] + 6, yr[1] + 30, lines[2], { size: 11, fill: "#555" });
  return {
    svg: canvas.render(),
    summary: {
      fittedSlope: fit.slope,
      metaFittedSlope: metaSlope,
      analyticLogD1: logD1,
      analyticTwoLogD1: twoLogD1,
      lines,
    },
  };
}

// -- window scan -----------------------------------------------------------------

export interface WindowScanSummary {
  bound: number;
  measuredEdge: number;
}

export function renderWindowScan(table: CsvTable): { svg: string; summary: WindowScanSummary } {
  requireSchema(table, "window-scan", SCHEMAS["window-scan"]);
  const x = column(table, "domega_over_omega");
  const flag = column(table, "unstable");
  const bound = column(table, "bound")[0];
  const { canvas, x: xr, y: yr } = frame();
  const xs = linearScale(extent(x), xr);
  const ys = linearScale([0, 1.2], yr);
  // step plot
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < x.length; i++) {
    if (i > 0) pts.push([xs(x[i]), ys(flag[i - 1])]);
    pts.push([xs(x[i]), ys(flag[i])]);
  }
  canvas.polyline(pts, "#1f6fb2");
  for (const edge of [-bound, bound]) {
    canvas.line(xs(edge), ys.range[0], xs(edge), ys.range[1], "#d62728", 1, "4,3");
  }
  canvas.text(xs(bound), yr[1] + 14, `bound = ${bound}`, {
    anchor: "middle",
    size: 11,
    fill: "#d62728",
  });
  canvas.axes(xs, ys, "d omega / omega", "unstable");
  let edge = 0;
  for (let i = 0; i < x.length; i++) {
    if (flag[i] === 1) edge = Math.max(edge, Math.abs(x[i]));
  }
  return { svg: canvas.render(), summary: { bound, measuredEdge: edge } };
}

// -- peak profile ------------------------------------------------------------------

export function renderPeakProfile(table: CsvTable): { svg: string; maxRelDiff: number } {
  requireSchema(table, "peak-profile", SCHEMAS["peak-profile"]);
  const eps = column(table, "eps");
  const predicted = column(table, "predicted");
  const exact = column(table, "exact");
  const { canvas, x: xr, y: yr } = frame();
  const xs = linearScale(extent(eps), xr);
  const ys = linearScale(extent([...predicted, ...exact]), yr);
  canvas.polyline(eps.map((e, i) => [xs(e), ys(exact[i])] as [number, number]), "#1f6fb2", 2);
  canvas.polyline(
    eps.map((e, i) => [xs(e), ys(predicted[i])] as [number, number]),
    "#d62728",
    1.2,
  );
  canvas.axes(xs, ys, "eps", "rho");
  canvas.text(xr[0] + 6, yr[1] + 14, "exact (blue) vs rescaled prediction (red)", { size: 12 });
  let worst = 0;
  for (let i = 0; i < eps.length; i++) {
    if (exact[i] !== 0) {
      worst = Math.max(worst, Math.abs(predicted[i] / exact[i] - 1));
    }
  }
  return { svg: canvas.render(), maxRelDiff: worst };
}
