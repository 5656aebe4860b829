/**
 * CSV schemas documented by the kerf CLI.
 *
 * exponents (from `kerf exponents`):  variant,d,previous,new,minimax
 * l2 rows   (from `kerf experiment`): variant,rule,n,k,seed,l2_error,wall_time_ms
 *
 * Parsing is strict: a missing column or a non-numeric cell aborts with the
 * offending column named, and an input without data rows is an error.
 */

import Papa from "papaparse";

export class SchemaError extends Error {
  constructor(message: string, public readonly column?: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface ExponentRow {
  variant: string;
  d: number;
  previous: number;
  newRate: number;
  minimax: number;
}

export interface L2Row {
  variant: string;
  rule: string;
  n: number;
  k: number;
  seed: number;
  l2Error: number;
}

const EXPONENT_COLUMNS = ["variant", "d", "previous", "new", "minimax"];
const L2_COLUMNS = ["variant", "rule", "n", "k", "seed", "l2_error", "wall_time_ms"];

function parseRows(text: string, required: string[]): Record<string, string>[] {
  const result = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const first = result.errors[0];
    throw new SchemaError(`malformed CSV: ${first.message} (row ${first.row})`);
  }
  const fields = result.meta.fields ?? [];
  for (const column of required) {
    if (!fields.includes(column)) {
      throw new SchemaError(`missing required column "${column}"`, column);
    }
  }
  if (result.data.length === 0) {
    throw new SchemaError("no data rows in input CSV");
  }
  return result.data;
}

function numeric(row: Record<string, string>, column: string, line: number): number {
  const value = Number(row[column]);
  if (row[column] === "" || row[column] === undefined || Number.isNaN(value)) {
    throw new SchemaError(
      `column "${column}" has non-numeric value ${JSON.stringify(row[column])} on data row ${line}`,
      column,
    );
  }
  return value;
}

export function parseExponentsCsv(text: string): ExponentRow[] {
  return parseRows(text, EXPONENT_COLUMNS).map((row, i) => ({
    variant: row.variant,
    d: numeric(row, "d", i + 1),
    previous: numeric(row, "previous", i + 1),
    newRate: numeric(row, "new", i + 1),
    minimax: numeric(row, "minimax", i + 1),
  }));
}

export function parseL2Csv(text: string): L2Row[] {
  return parseRows(text, L2_COLUMNS).map((row, i) => ({
    variant: row.variant,
    rule: row.rule,
    n: numeric(row, "n", i + 1),
    k: numeric(row, "k", i + 1),
    seed: numeric(row, "seed", i + 1),
    l2Error: numeric(row, "l2_error", i + 1),
  }));
}
