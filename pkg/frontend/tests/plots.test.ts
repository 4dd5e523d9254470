import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { readCsv, SchemaError } from "../src/csv.js";
import { renderPlot } from "../src/plots.js";
import { main } from "../src/cli.js";

const FIX = join(__dirname, "fixtures");
const exclusionFiles = [
  join(FIX, "exclusion_v12_13_unpolarized-50um.csv"),
  join(FIX, "exclusion_v12_13_unpolarized-5um.csv"),
  join(FIX, "exclusion_v12_13_unpolarized-0.5um.csv"),
];
const sweepFiles = ["d_nv", "d_tm", "R_tm", "d_gap"].map((p) => join(FIX, `sweep_${p}.csv`));

describe("csv parsing", () => {
  it("reads a fixture with the exact schema", () => {
    const t = readCsv(exclusionFiles[0], ["lambda_m", "f_min", "f_min_stderr"]);
    expect(t.data.get("lambda_m")).toHaveLength(3);
  });

  it("names the file and column on schema mismatch", () => {
    expect(() => readCsv(exclusionFiles[0], ["no_such_column"])).toThrowError(
      expect.objectContaining({
        name: "SchemaError",
        column: "no_such_column",
        file: exclusionFiles[0],
      }),
    );
  });

  it("rejects non-numeric cells with the offending column", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "lambda_m,f\n1e-6,oops\n");
    try {
      readCsv(bad, ["lambda_m", "f"]);
      expect.unreachable();
    } catch (err) {
      expect((err as SchemaError).column).toBe("f");
    }
  });
});

describe("figure kinds", () => {
  it("renders a sweep with one curve + peak marker per file", () => {
    const svg = renderPlot("sweep", sweepFiles);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<path d=/g)?.length).toBe(4);
    expect(svg.match(/<circle/g)?.length).toBe(4);
  });

  it("renders a log-log exclusion figure with three dashed curves and shading above", () => {
    const svg = renderPlot("exclusion", exclusionFiles);
    expect(svg.match(/stroke-dasharray="6 4"/g)?.length).toBe(3);
    const poly = svg.match(/<polygon points="([^"]+)"/);
    expect(poly).not.toBeNull();
    // shaded region closes along the TOP of the frame (y = 32), i.e. above the curve
    const ys = poly![1].split(" ").map((p) => Number(p.split(",")[1]));
    expect(Math.min(...ys)).toBe(32);
  });

  it("overlays are shaded and drawn", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const overlay = join(dir, "constraint.csv");
    writeFileSync(overlay, "lambda_m,f\n5.0e-07,1e-18\n5.0e-05,1e-24\n");
    const svg = renderPlot("exclusion", exclusionFiles, [overlay]);
    expect(svg.match(/<polygon/g)?.length).toBe(2);
    expect(svg).toContain("constraint");
  });

  it("renders responsivity with two curves and a peak marker", () => {
    const svg = renderPlot("responsivity", [join(FIX, "responsivity.csv")]);
    expect(svg.match(/<path d=/g)?.length).toBe(2);
    expect(svg).toContain("signal-weighted");
  });

  it("renders the stray-field curve with error bars", () => {
    const svg = renderPlot("strayfield", [join(FIX, "strayfield.csv")]);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("displacement (m)");
  });

  it("renders budget bars with a detection-floor marker", () => {
    const svg = renderPlot("budget-bar", [join(FIX, "budget.json")]);
    expect(svg.match(/<rect x="80"/g)!.length).toBeGreaterThanOrEqual(5);
    expect(svg).toContain("detection floor");
  });
});

describe("stability and cli", () => {
  it("re-render is byte-identical", () => {
    for (const [kind, inputs] of [
      ["sweep", sweepFiles],
      ["exclusion", exclusionFiles],
      ["responsivity", [join(FIX, "responsivity.csv")]],
      ["strayfield", [join(FIX, "strayfield.csv")]],
      ["budget-bar", [join(FIX, "budget.json")]],
    ] as const) {
      expect(renderPlot(kind, [...inputs])).toBe(renderPlot(kind, [...inputs]));
    }
  });

  it("cli writes the file and returns 0", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "fig.svg");
    expect(main(["exclusion", ...exclusionFiles, "--out", out])).toBe(0);
    expect(readFileSync(out, "utf-8").startsWith("<svg")).toBe(true);
  });

  it("cli rejects unknown kinds and missing inputs", () => {
    expect(main(["volcano", "--out", "x.svg"])).toBe(2);
    expect(main(["sweep", "--out", "x.svg"])).toBe(2);
  });

  it("cli reports schema mismatch with exit 2", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "a,b\n1,2\n");
    const out = join(dir, "fig.svg");
    expect(main(["exclusion", bad, "--out", out])).toBe(2);
  });
});
