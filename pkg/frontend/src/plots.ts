import { basename } from "node:path";
import { readFileSync } from "node:fs";
import { column, readCsv, SchemaError, Table } from "./csv.js";
import {
  Frame,
  frame,
  HEIGHT,
  linearScale,
  logScale,
  MARGIN,
  PALETTE,
  path,
  polygon,
  render,
  Scale,
  WIDTH,
} from "./svg.js";

const X0 = MARGIN.left;
const X1 = WIDTH - MARGIN.right;
const Y0 = HEIGHT - MARGIN.bottom;
const Y1 = MARGIN.top;

const label = (file: string): string => basename(file).replace(/\.(csv|json)$/, "");

function extent(vals: number[]): [number, number] {
  return [Math.min(...vals), Math.max(...vals)];
}

function positiveExtent(vals: number[]): [number, number] {
  const pos = vals.filter((v) => v > 0);
  if (pos.length === 0) return [1e-30, 1];
  return extent(pos);
}

function legend(f: Frame, names: string[]): void {
  names.forEach((name, i) => {
    const y = Y1 + 16 + 16 * i;
    const color = PALETTE[i % PALETTE.length];
    f.body.push(`<line x1="${X0 + 10}" y1="${y}" x2="${X0 + 34}" y2="${y}" stroke="${color}" stroke-width="2"/>`);
    f.body.push(`<text x="${X0 + 40}" y="${y + 4}" font-size="12">${name}</text>`);
  });
}

function errorBars(f: Frame, xs: number[], ys: number[], es: number[], color: string, logY: boolean): void {
  xs.forEach((x, i) => {
    if (es[i] <= 0) return;
    const lo = logY ? Math.max(ys[i] - es[i], f.sy.domain[0]) : ys[i] - es[i];
    const hi = ys[i] + es[i];
    const px = f.sx(x).toFixed(2);
    f.body.push(
      `<line x1="${px}" y1="${f.sy(lo).toFixed(2)}" x2="${px}" y2="${f.sy(hi).toFixed(2)}" stroke="${color}" stroke-width="1"/>`,
    );
  });
}

/** Normalized figure-of-merit vs geometry parameter, one curve per file (log x). */
export function renderSweep(files: string[]): string {
  const tables = files.map((fp) => readCsv(fp, ["param_value_m", "fom_normalized", "stderr"]));
  const allX = tables.flatMap((t) => column(t, "param_value_m"));
  const sx = logScale(...positiveExtent(allX), X0, X1);
  const sy = linearScale(0, 1.05, Y0, Y1);
  const f = frame(sx, sy, "parameter value (m)", "figure of merit (normalized)", "geometry sweep");
  tables.forEach((t, i) => {
    const color = PALETTE[i % PALETTE.length];
    const xs = column(t, "param_value_m");
    const ys = column(t, "fom_normalized");
    f.body.push(`<path d="${path(xs, ys, sx, sy)}" fill="none" stroke="${color}" stroke-width="2"/>`);
    errorBars(f, xs, ys, column(t, "stderr"), color, false);
    const peak = ys.indexOf(Math.max(...ys));
    f.body.push(
      `<circle cx="${sx(xs[peak]).toFixed(2)}" cy="${sy(ys[peak]).toFixed(2)}" r="4" fill="${color}"/>`,
    );
  });
  legend(f, tables.map((t) => label(t.file)));
  return render(f);
}

/**
 * Minimum detectable coupling vs interaction length, log-log, dashed curves;
 * the region above the pointwise-lowest curve is shaded as excluded, and any
 * overlay files (columns lambda_m, f) are shaded the same way.
 */
export function renderExclusion(files: string[], overlays: string[] = []): string {
  const tables = files.map((fp) => readCsv(fp, ["lambda_m", "f_min", "f_min_stderr"]));
  const overlayTables = overlays.map((fp) => readCsv(fp, ["lambda_m", "f"]));
  const allX = tables.flatMap((t) => column(t, "lambda_m")).concat(
    overlayTables.flatMap((t) => column(t, "lambda_m")),
  );
  const allY = tables.flatMap((t) => column(t, "f_min")).concat(
    overlayTables.flatMap((t) => column(t, "f")),
  );
  const sx = logScale(...positiveExtent(allX), X0, X1);
  const [yLo, yHi] = positiveExtent(allY);
  const sy = logScale(yLo / 3, yHi * 3, Y0, Y1);
  const f = frame(sx, sy, "interaction length (m)", "coupling constant f", "exclusion limits");

  const envelope = (xs: number[], ys: number[]): Array<[number, number]> => {
    const byX = new Map<number, number>();
    xs.forEach((x, i) => {
      const cur = byX.get(x);
      if (cur === undefined || ys[i] < cur) byX.set(x, ys[i]);
    });
    return [...byX.entries()].sort((a, b) => a[0] - b[0]);
  };

  const shade = (pts: Array<[number, number]>, fill: string): void => {
    if (pts.length < 2) return;
    const poly: Array<[number, number]> = pts.map(([x, y]) => [sx(x), sy(y)]);
    poly.push([sx(pts[pts.length - 1][0]), Y1], [sx(pts[0][0]), Y1]);
    f.body.push(`<polygon points="${polygon(poly)}" fill="${fill}" stroke="none"/>`);
  };

  shade(
    envelope(tables.flatMap((t) => column(t, "lambda_m")), tables.flatMap((t) => column(t, "f_min"))),
    "rgba(31,119,180,0.15)",
  );
  for (const t of overlayTables) {
    shade(envelope(column(t, "lambda_m"), column(t, "f")), "rgba(127,127,127,0.25)");
  }

  tables.forEach((t, i) => {
    const color = PALETTE[i % PALETTE.length];
    const xs = column(t, "lambda_m");
    const ys = column(t, "f_min");
    f.body.push(
      `<path d="${path(xs, ys, sx, sy)}" fill="none" stroke="${color}" stroke-width="2" stroke-dasharray="6 4"/>`,
    );
    errorBars(f, xs, ys, column(t, "f_min_stderr"), color, true);
  });
  overlayTables.forEach((t, i) => {
    f.body.push(
      `<path d="${path(column(t, "lambda_m"), column(t, "f"), sx, sy)}" fill="none" stroke="#555" stroke-width="1.5"/>`,
    );
  });
  legend(f, tables.map((t) => label(t.file)).concat(overlayTables.map((t) => label(t.file))));
  return render(f);
}

/** Transition responsivity and its signal-weighted form vs bias angle. */
export function renderResponsivity(files: string[]): string {
  const t = readCsv(files[0], ["theta_deg", "responsivity_hz_per_t", "weighted"]);
  const xs = column(t, "theta_deg");
  const resp = column(t, "responsivity_hz_per_t");
  const weighted = column(t, "weighted");
  const r0 = resp[0] || 1;
  const normResp = resp.map((v) => v / r0);
  const sx = linearScale(...extent(xs), X0, X1);
  const sy = linearScale(0, 1.05, Y0, Y1);
  const f = frame(sx, sy, "bias angle (deg)", "responsivity / responsivity(0)", "responsivity vs bias angle");
  f.body.push(`<path d="${path(xs, normResp, sx, sy)}" fill="none" stroke="${PALETTE[0]}" stroke-width="2"/>`);
  const wMax = Math.max(...weighted) || 1;
  f.body.push(
    `<path d="${path(xs, weighted.map((v) => v / wMax), sx, sy)}" fill="none" stroke="${PALETTE[1]}" stroke-width="2"/>`,
  );
  const peak = weighted.indexOf(Math.max(...weighted));
  f.body.push(`<circle cx="${sx(xs[peak]).toFixed(2)}" cy="${sy(weighted[peak] / wMax).toFixed(2)}" r="4" fill="${PALETTE[1]}"/>`);
  legend(f, ["responsivity (normalized)", "signal-weighted (normalized)"]);
  return render(f);
}

/** Stray field along the sensing axis vs lateral mass displacement. */
export function renderStrayField(files: string[]): string {
  const tables = files.map((fp) => readCsv(fp, ["displacement_m", "b_T", "stderr"]));
  const allX = tables.flatMap((t) => column(t, "displacement_m"));
  const allY = tables.flatMap((t) => column(t, "b_T"));
  const [yLo, yHi] = extent(allY);
  const pad = (yHi - yLo || Math.abs(yHi) || 1) * 0.1;
  const sx = linearScale(...extent(allX), X0, X1);
  const sy = linearScale(yLo - pad, yHi + pad, Y0, Y1);
  const f = frame(sx, sy, "displacement (m)", "stray field (T)", "stray field vs displacement");
  tables.forEach((t, i) => {
    const color = PALETTE[i % PALETTE.length];
    const xs = column(t, "displacement_m");
    const ys = column(t, "b_T");
    f.body.push(`<path d="${path(xs, ys, sx, sy)}" fill="none" stroke="${color}" stroke-width="2"/>`);
    errorBars(f, xs, ys, column(t, "stderr"), color, false);
  });
  legend(f, tables.map((t) => label(t.file)));
  return render(f);
}

interface BudgetEntry {
  name: string;
  spurious_field: number;
}

/** Horizontal log-scale bars of spurious fields, with the detection floor marked. */
export function renderBudgetBar(files: string[]): string {
  const file = files[0];
  let parsed: { entries: BudgetEntry[]; delta_b_min: number };
  try {
    parsed = JSON.parse(readFileSync(file, "utf-8"));
  } catch (err) {
    throw new SchemaError(file, "-", `not valid JSON: ${String(err)}`);
  }
  if (!Array.isArray(parsed.entries)) {
    throw new SchemaError(file, "entries", "missing or not an array");
  }
  for (const e of parsed.entries) {
    if (typeof e.name !== "string") throw new SchemaError(file, "entries[].name", "missing");
    if (typeof e.spurious_field !== "number") {
      throw new SchemaError(file, "entries[].spurious_field", "missing");
    }
  }
  const fields = parsed.entries.map((e) => e.spurious_field);
  const pos = fields.filter((v) => v > 0);
  const ref = parsed.delta_b_min;
  const lo = Math.min(...pos, ref) / 10;
  const hi = Math.max(...pos, ref) * 3;
  const sx = logScale(lo, hi, X0, X1);
  const sy = linearScale(0, parsed.entries.length, Y0, Y1);
  const f = frame(sx, sy, "spurious field (T)", "", "systematics budget");
  f.sy.ticks = () => [];
  parsed.entries.forEach((e, i) => {
    const yTop = sy(i + 0.8);
    const yBot = sy(i + 0.2);
    const xEnd = e.spurious_field > 0 ? sx(e.spurious_field) : X0;
    f.body.push(
      `<rect x="${X0}" y="${yTop.toFixed(2)}" width="${(xEnd - X0).toFixed(2)}" height="${(yBot - yTop).toFixed(2)}" fill="${PALETTE[0]}" fill-opacity="0.8"/>`,
    );
    f.body.push(
      `<text x="${X0 + 4}" y="${((yTop + yBot) / 2).toFixed(2)}" dominant-baseline="middle" font-size="12">${e.name}</text>`,
    );
  });
  const refX = sx(ref).toFixed(2);
  f.body.push(
    `<line x1="${refX}" y1="${Y0}" x2="${refX}" y2="${Y1}" stroke="#d62728" stroke-width="1.5" stroke-dasharray="4 3"/>`,
  );
  f.body.push(
    `<text x="${refX}" y="${Y1 - 4}" text-anchor="middle" font-size="11" fill="#d62728">detection floor</text>`,
  );
  return render(f);
}

export type PlotKind = "sweep" | "exclusion" | "responsivity" | "strayfield" | "budget-bar";

export function renderPlot(kind: PlotKind, inputs: string[], overlays: string[] = []): string {
  if (inputs.length === 0) throw new Error("no input files given");
  switch (kind) {
    case "sweep":
      return renderSweep(inputs);
    case "exclusion":
      return renderExclusion(inputs, overlays);
    case "responsivity":
      return renderResponsivity(inputs);
    case "strayfield":
      return renderStrayField(inputs);
    case "budget-bar":
      return renderBudgetBar(inputs);
    default:
      throw new Error(`unknown plot kind "${kind satisfies never}"`);
  }
}
