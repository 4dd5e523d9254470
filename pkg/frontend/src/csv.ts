import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** Raised when an input file does not match the expected column schema. */
export class SchemaError extends Error {
  constructor(
    public readonly file: string,
    public readonly column: string,
    detail: string,
  ) {
    super(`${file}: column "${column}": ${detail}`);
    this.name = "SchemaError";
  }
}

export interface Table {
  file: string;
  columns: string[];
  /** Row-major numeric data, one array per column name. */
  data: Map<string, number[]>;
}

/**
 * Parse a CSV file with a header row and all-numeric body.
 * `required` columns must be present; extra columns are kept.
 */
export function readCsv(file: string, required: string[]): Table {
  const text = readFileSync(file, "utf-8");
  const parsed = Papa.parse<string[]>(text.trimEnd(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(file, "-", parsed.errors[0].message);
  }
  const rows = parsed.data;
  if (rows.length < 2) {
    throw new SchemaError(file, "-", "need a header row and at least one data row");
  }
  const columns = rows[0];
  for (const col of required) {
    if (!columns.includes(col)) {
      throw new SchemaError(file, col, "missing from header");
    }
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (const row of rows.slice(1)) {
    if (row.length !== columns.length) {
      throw new SchemaError(file, "-", `row has ${row.length} fields, expected ${columns.length}`);
    }
    row.forEach((cell, i) => {
      const v = Number(cell);
      if (!Number.isFinite(v)) {
        throw new SchemaError(file, columns[i], `non-numeric value "${cell}"`);
      }
      data.get(columns[i])!.push(v);
    });
  }
  return { file, columns, data };
}

export function column(t: Table, name: string): number[] {
  const col = t.data.get(name);
  if (col === undefined) {
    throw new SchemaError(t.file, name, "missing from header");
  }
  return col;
}
