/**
 * Parsing and validation of the simulation harness CSV contract.
 *
 * The expected header is fixed; violations raise SchemaError carrying the
 * name of the offending column so the CLI can report it precisely.
 */

export const EXPECTED_COLUMNS = [
  "scheme",
  "point_kind",
  "point_value",
  "n_trials",
  "successes",
  "success_rate",
  "mean_rate",
  "se_rate",
  "slots",
  "feedback_slots",
] as const;

export type ColumnName = (typeof EXPECTED_COLUMNS)[number];

export interface MetricsRow {
  scheme: string;
  point_kind: string;
  point_value: number;
  n_trials: number;
  successes: number;
  success_rate: number;
  mean_rate: number;
  se_rate: number;
  slots: number;
  feedback_slots: number;
}

export class SchemaError extends Error {
  readonly column: string;

  constructor(column: string, message: string) {
    super(message);
    this.name = "SchemaError";
    this.column = column;
  }
}

const INT_COLUMNS: ReadonlySet<string> = new Set([
  "n_trials",
  "successes",
  "slots",
  "feedback_slots",
]);

function parseNumber(column: string, raw: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(
      column,
      `column ${column}: value ${JSON.stringify(raw)} on line ${line} is not a number`,
    );
  }
  if (INT_COLUMNS.has(column) && !Number.isInteger(value)) {
    throw new SchemaError(
      column,
      `column ${column}: value ${JSON.stringify(raw)} on line ${line} is not an integer`,
    );
  }
  return value;
}

/** Parse one harness CSV document, enforcing the exact column contract. */
export function parseMetricsCsv(text: string): MetricsRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new SchemaError("scheme", "empty CSV: missing header and column scheme");
  }
  const header = lines[0].split(",").map((c) => c.trim());
  for (const column of EXPECTED_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(column, `missing column ${column}`);
    }
  }
  for (const column of header) {
    if (!(EXPECTED_COLUMNS as readonly string[]).includes(column)) {
      throw new SchemaError(column, `unexpected column ${column}`);
    }
  }
  const index = new Map(header.map((c, i) => [c, i]));
  const rows: MetricsRow[] = [];
  lines.slice(1).forEach((line, i) => {
    const fields = line.split(",");
    const lineno = i + 2;
    if (fields.length !== header.length) {
      throw new SchemaError(
        header[Math.min(fields.length, header.length) - 1],
        `line ${lineno}: expected ${header.length} fields, got ${fields.length}`,
      );
    }
    const cell = (column: ColumnName) => fields[index.get(column)!];
    const row: MetricsRow = {
      scheme: cell("scheme").trim(),
      point_kind: cell("point_kind").trim(),
      point_value: parseNumber("point_value", cell("point_value"), lineno),
      n_trials: parseNumber("n_trials", cell("n_trials"), lineno),
      successes: parseNumber("successes", cell("successes"), lineno),
      success_rate: parseNumber("success_rate", cell("success_rate"), lineno),
      mean_rate: parseNumber("mean_rate", cell("mean_rate"), lineno),
      se_rate: parseNumber("se_rate", cell("se_rate"), lineno),
      slots: parseNumber("slots", cell("slots"), lineno),
      feedback_slots: parseNumber("feedback_slots", cell("feedback_slots"), lineno),
    };
    if (row.scheme === "") {
      throw new SchemaError("scheme", `column scheme: empty value on line ${lineno}`);
    }
    if (row.success_rate < 0 || row.success_rate > 1) {
      throw new SchemaError(
        "success_rate",
        `column success_rate: ${row.success_rate} on line ${lineno} outside [0, 1]`,
      );
    }
    rows.push(row);
  });
  return rows;
}

/** Scheme names in first-appearance (CSV) order. */
export function schemesInOrder(rows: MetricsRow[]): string[] {
  const seen: string[] = [];
  for (const row of rows) {
    if (!seen.includes(row.scheme)) {
      seen.push(row.scheme);
    }
  }
  return seen;
}
