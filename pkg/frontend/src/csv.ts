/** Strict reading of the simulator's CSV artifacts. Every figure kind
 * declares its exact header; anything else fails with a named-column
 * diagnostic instead of a misrendered plot. */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: number[][];
}

export const PHASE_COLUMNS = [
  "gamma", "r", "rho_C", "rho_D", "rho_Q", "converged",
] as const;
export const SCAN_COLUMNS = [
  "gamma", "mean_rho_C", "mean_rho_D", "mean_rho_Q", "se_rho_Q", "replicates",
] as const;
export const TRAJECTORY_COLUMNS = ["t", "rho_C", "rho_D", "rho_Q"] as const;

function describeMismatch(
  path: string,
  expected: readonly string[],
  found: string[],
): string {
  const missing = expected.filter((c) => !found.includes(c));
  const unexpected = found.filter((c) => !expected.includes(c as string));
  const parts = [
    `${path}: header mismatch`,
    `expected columns [${expected.join(", ")}]`,
    `found [${found.join(", ")}]`,
  ];
  if (missing.length > 0) parts.push(`missing: ${missing.join(", ")}`);
  if (unexpected.length > 0) parts.push(`unexpected: ${unexpected.join(", ")}`);
  return parts.join("; ");
}

/** Parse `path` and require its header to equal `expected` exactly. */
export function readTable(path: string, expected: readonly string[]): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<string[]>(text.trim(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaError(`${path}: ${first.message} (row ${first.row})`);
  }
  const [header, ...body] = parsed.data;
  if (header === undefined) {
    throw new SchemaError(`${path}: file is empty, expected a header row`);
  }
  const columns = header.map((c) => c.trim());
  if (
    columns.length !== expected.length ||
    columns.some((c, i) => c !== expected[i])
  ) {
    throw new SchemaError(describeMismatch(path, expected, columns));
  }
  const rows = body.map((cells, rowIdx) => {
    if (cells.length !== expected.length) {
      throw new SchemaError(
        `${path}: row ${rowIdx + 2} has ${cells.length} fields, ` +
          `expected ${expected.length}`,
      );
    }
    return cells.map((cell, colIdx) => {
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new SchemaError(
          `${path}: row ${rowIdx + 2}, column ${expected[colIdx]}: ` +
            `cannot parse ${JSON.stringify(cell)} as a number`,
        );
      }
      return value;
    });
  });
  return { columns, rows };
}

/** Column values by name; the header was validated, so this is total. */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new SchemaError(`internal: no column ${name}`);
  return table.rows.map((row) => row[idx]!);
}
