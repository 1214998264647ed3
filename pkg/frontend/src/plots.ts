import { numeric, parseTable, requireColumns, SchemaError, Table } from "./csv.js";
import { logLogSlope } from "./fit.js";
import {
  axes,
  circle,
  document,
  HEIGHT,
  line,
  linearScale,
  log10Ticks,
  MARGIN,
  PALETTE,
  polyline,
  powerLabel,
  px,
  rect,
  text,
  WIDTH,
} from "./svg.js";

export type PlotKind = "rate_loglog" | "fractions_bars" | "curve_overlay";

export interface PlotJob {
  kind: PlotKind;
  input: string; // CSV text
  source: string; // label for error messages, usually the file path
  guideExponent: number;
}

export function render(job: PlotJob): string {
  const table = parseTable(job.input, job.source);
  switch (job.kind) {
    case "rate_loglog":
      return renderRateLoglog(table, job.source, job.guideExponent);
    case "fractions_bars":
      return renderFractionsBars(table, job.source);
    case "curve_overlay":
      return renderCurveOverlay(table, job.source);
  }
}

function positive(
  row: Record<string, string>,
  column: string,
  source: string,
): number {
  const value = numeric(row, column, source);
  if (value <= 0) {
    throw new SchemaError(
      `${source}: column "${column}" must be positive for a log axis, got ${value}`,
    );
  }
  return value;
}

function groupBy<T>(items: T[], key: (item: T) => string): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = groups.get(k);
    if (bucket === undefined) {
      groups.set(k, [item]);
    } else {
      bucket.push(item);
    }
  }
  return groups;
}

function plotArea() {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

function logAxesMarks(
  sx: (v: number) => number,
  sy: (v: number) => number,
  xDomain: [number, number],
  yDomain: [number, number],
): string[] {
  const { x0, y0 } = plotArea();
  const marks: string[] = [];
  for (const tick of log10Ticks(xDomain)) {
    const x = sx(tick);
    marks.push(line(x, y0, x, y0 + 5, "black"));
    marks.push(text(x, y0 + 20, powerLabel(tick), "middle", 11));
  }
  for (const tick of log10Ticks(yDomain)) {
    const y = sy(tick);
    marks.push(line(x0 - 5, y, x0, y, "black"));
    marks.push(text(x0 - 8, y + 4, powerLabel(tick), "end", 11));
  }
  return marks;
}

function pad(domain: [number, number], fraction = 0.06): [number, number] {
  const span = domain[1] - domain[0] || 1;
  return [domain[0] - fraction * span, domain[1] + fraction * span];
}

/**
 * Log-log ensemble error against eps, one series per estimator, each
 * annotated with its fitted slope, plus a dashed guide line of slope
 * `guideExponent` anchored at the largest-eps point of the first series.
 */
export function renderRateLoglog(
  table: Table,
  source: string,
  guideExponent: number,
): string {
  requireColumns(table, ["estimator", "eps", "l2_error", "std_error"], source);
  const series = groupBy(table.rows, (row) => row["estimator"]!);
  const points = new Map<string, Array<[number, number]>>();
  for (const [estimator, rows] of series) {
    const pts = rows
      .map(
        (row) =>
          [positive(row, "eps", source), positive(row, "l2_error", source)] as [
            number,
            number,
          ],
      )
      .sort((a, b) => a[0] - b[0]);
    points.set(estimator, pts);
  }

  const first = [...points.values()][0]!;
  const anchor = first[first.length - 1]!; // largest eps of the first series
  const allEps = [...points.values()].flat().map(([e]) => e);
  const epsMin = Math.min(...allEps);
  const epsMax = Math.max(...allEps);
  const guide = (eps: number) =>
    anchor[1] * Math.pow(eps / anchor[0], guideExponent);

  const logX = (v: number) => Math.log10(v);
  const allY = [...points.values()].flat().map(([, y]) => y);
  allY.push(guide(epsMin), guide(epsMax));
  const xDomain = pad([logX(epsMin), logX(epsMax)]);
  const yDomain = pad([
    Math.log10(Math.min(...allY)),
    Math.log10(Math.max(...allY)),
  ]);
  const { x0, x1, y0, y1 } = plotArea();
  const sx = linearScale(xDomain, [x0, x1]);
  const sy = linearScale(yDomain, [y0, y1]);

  const marks: string[] = axes(
    "eps",
    "L2 sup error",
    "Ensemble error vs smoothing width",
  );
  marks.push(...logAxesMarks(sx, sy, xDomain, yDomain));
  marks.push(
    polyline(
      [
        [sx(logX(epsMin)), sy(Math.log10(guide(epsMin)))],
        [sx(logX(epsMax)), sy(Math.log10(guide(epsMax)))],
      ],
      "#777777",
      ' stroke-dasharray="6 4"',
    ),
    text(
      x1 - 4,
      sy(Math.log10(guide(epsMax))) - 8,
      `guide slope ${guideExponent.toFixed(3)}`,
      "end",
      11,
    ),
  );
  let index = 0;
  for (const [estimator, pts] of points) {
    const color = PALETTE[index % PALETTE.length]!;
    const slope = logLogSlope(
      pts.map(([e]) => e),
      pts.map(([, y]) => y),
    );
    const screen = pts.map(
      ([e, y]) => [sx(logX(e)), sy(Math.log10(y))] as [number, number],
    );
    marks.push(polyline(screen, color));
    for (const [x, y] of screen) {
      marks.push(circle(x, y, color));
    }
    marks.push(
      text(
        x0 + 10,
        y1 + 16 + 16 * index,
        `${estimator}: slope ${slope.toFixed(3)}`,
        "start",
        12,
      ),
      rect(x0 + 0, y1 + 8 + 16 * index, 8, 8, color),
    );
    index += 1;
  }
  return document(marks);
}

const RATIO_ORDER = ["I3", "I4", "I5", "SmoothedQuarter"];

/**
 * Grouped bars of the mean terminal ratio (estimate over local time) per
 * eps, with one bar per ratio kind and +/- one standard error whiskers.
 */
export function renderFractionsBars(table: Table, source: string): string {
  requireColumns(
    table,
    ["generator", "eps", "ratio_kind", "mean", "std_error"],
    source,
  );
  const kinds = [...new Set(table.rows.map((row) => row["ratio_kind"]!))];
  kinds.sort(
    (a, b) =>
      (RATIO_ORDER.includes(a) ? RATIO_ORDER.indexOf(a) : RATIO_ORDER.length) -
        (RATIO_ORDER.includes(b) ? RATIO_ORDER.indexOf(b) : RATIO_ORDER.length) ||
      a.localeCompare(b),
  );
  const byEps = groupBy(table.rows, (row) => row["eps"]!);
  const epsKeys = [...byEps.keys()].sort(
    (a, b) => Number(b) - Number(a), // coarse to fine, left to right
  );
  const tops = table.rows.map(
    (row) =>
      numeric(row, "mean", source) + numeric(row, "std_error", source),
  );
  const yMax = Math.max(0.6, ...tops) * 1.05;

  const { x0, x1, y0, y1 } = plotArea();
  const sy = linearScale([0, yMax], [y0, y1]);
  const groupWidth = (x1 - x0) / epsKeys.length;
  const barWidth = (groupWidth * 0.8) / kinds.length;

  const marks: string[] = axes(
    "eps",
    "mean ratio to local time",
    "Decomposition fractions of the local time",
  );
  for (const ref of [0.25, 0.5]) {
    marks.push(
      line(x0, sy(ref), x1, sy(ref), "#999999", ' stroke-dasharray="4 4"'),
      text(x1 + 2, sy(ref) + 4, ref.toFixed(2), "start", 10),
    );
  }
  for (const tick of [0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]) {
    if (tick > yMax) continue;
    marks.push(
      line(x0 - 5, sy(tick), x0, sy(tick), "black"),
      text(x0 - 8, sy(tick) + 4, tick.toFixed(1), "end", 11),
    );
  }
  epsKeys.forEach((epsKey, g) => {
    const groupLeft = x0 + g * groupWidth + groupWidth * 0.1;
    marks.push(
      text(x0 + (g + 0.5) * groupWidth, y0 + 20, epsKey, "middle", 10),
    );
    const rows = byEps.get(epsKey)!;
    kinds.forEach((kind, k) => {
      const row = rows.find((r) => r["ratio_kind"] === kind);
      if (row === undefined) return;
      const mean = numeric(row, "mean", source);
      const se = numeric(row, "std_error", source);
      const color = PALETTE[k % PALETTE.length]!;
      const bx = groupLeft + k * barWidth;
      marks.push(rect(bx, sy(mean), barWidth * 0.9, y0 - sy(mean), color));
      const cx = bx + barWidth * 0.45;
      marks.push(line(cx, sy(mean - se), cx, sy(mean + se), "black"));
    });
  });
  kinds.forEach((kind, k) => {
    marks.push(
      rect(x0 + 0, y1 + 8 + 16 * k, 8, 8, PALETTE[k % PALETTE.length]!),
      text(x0 + 12, y1 + 16 + 16 * k, kind, "start", 12),
    );
  });
  return document(marks);
}

/**
 * Per-path sup-error curves against eps on log-log axes (light gray), with
 * the ensemble root-mean-square curve highlighted.  Uses the first
 * estimator present in the file.
 */
export function renderCurveOverlay(table: Table, source: string): string {
  requireColumns(table, ["estimator", "eps", "seed", "sup_error"], source);
  const estimator = table.rows[0]!["estimator"]!;
  const rows = table.rows.filter((row) => row["estimator"] === estimator);
  const bySeed = groupBy(rows, (row) => row["seed"]!);
  const curves = [...bySeed.values()].map((seedRows) =>
    seedRows
      .map(
        (row) =>
          [
            positive(row, "eps", source),
            positive(row, "sup_error", source),
          ] as [number, number],
      )
      .sort((a, b) => a[0] - b[0]),
  );
  const epsValues = [...new Set(rows.map((row) => row["eps"]!))]
    .map(Number)
    .sort((a, b) => a - b);
  const rms = epsValues.map((eps) => {
    const errors = rows
      .filter((row) => Number(row["eps"]) === eps)
      .map((row) => positive(row, "sup_error", source));
    return [
      eps,
      Math.sqrt(errors.reduce((a, e) => a + e * e, 0) / errors.length),
    ] as [number, number];
  });

  const all = [...curves.flat(), ...rms];
  const xDomain = pad([
    Math.log10(Math.min(...all.map(([e]) => e))),
    Math.log10(Math.max(...all.map(([e]) => e))),
  ]);
  const yDomain = pad([
    Math.log10(Math.min(...all.map(([, y]) => y))),
    Math.log10(Math.max(...all.map(([, y]) => y))),
  ]);
  const { x0, x1, y0, y1 } = plotArea();
  const sx = linearScale(xDomain, [x0, x1]);
  const sy = linearScale(yDomain, [y0, y1]);
  const toScreen = (pts: Array<[number, number]>) =>
    pts.map(
      ([e, y]) => [sx(Math.log10(e)), sy(Math.log10(y))] as [number, number],
    );

  const marks: string[] = axes(
    "eps",
    "sup error",
    `Per-path error curves (${estimator}, ${curves.length} paths)`,
  );
  marks.push(...logAxesMarks(sx, sy, xDomain, yDomain));
  for (const curve of curves) {
    marks.push(polyline(toScreen(curve), "#bbbbbb", ' stroke-width="0.8"'));
  }
  const rmsScreen = toScreen(rms);
  marks.push(polyline(rmsScreen, PALETTE[0]!));
  for (const [x, y] of rmsScreen) {
    marks.push(circle(x, y, PALETTE[0]!));
  }
  marks.push(
    rect(x0 + 0, y1 + 8, 8, 8, PALETTE[0]!),
    text(x0 + 12, y1 + 16, "ensemble RMS", "start", 12),
  );
  return document(marks);
}

export { px };
