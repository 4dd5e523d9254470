#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { PlotKind, renderPlot } from "./plots.js";
import { SchemaError } from "./csv.js";

const KINDS = ["sweep", "exclusion", "responsivity", "strayfield", "budget-bar"];

const USAGE = `usage: exospin-plot <kind> <input>... --out <file.svg> [--overlay <file.csv>]...
  kind: ${KINDS.join(" | ")}
  Inputs are the exospin CLI's CSV/JSON outputs; strayfield takes CSV columns
  displacement_m,b_T,stderr. Output format is SVG.`;

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        out: { type: "string" },
        overlay: { type: "string", multiple: true },
        format: { type: "string", default: "svg" },
      },
    });
  } catch (err) {
    process.stderr.write(`${String(err)}\n${USAGE}\n`);
    return 2;
  }
  const [kind, ...inputs] = args.positionals;
  if (!kind || !KINDS.includes(kind) || inputs.length === 0 || !args.values.out) {
    process.stderr.write(`${USAGE}\n`);
    return 2;
  }
  if (args.values.format !== "svg") {
    process.stderr.write(`only SVG output is supported (got "${args.values.format}")\n`);
    return 2;
  }
  try {
    const svg = renderPlot(kind as PlotKind, inputs, args.values.overlay ?? []);
    writeFileSync(args.values.out, svg, "utf-8");
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema mismatch: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
  return 0;
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
  process.exit(main(process.argv.slice(2)));
}
