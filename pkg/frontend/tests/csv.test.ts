import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import {
  PHASE_COLUMNS,
  SCAN_COLUMNS,
  TRAJECTORY_COLUMNS,
  SchemaError,
  column,
  readTable,
} from "../src/csv.js";

const FIXTURES = new URL("./fixtures/", import.meta.url).pathname;

function tmpCsv(name: string, text: string): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-csv-"));
  const p = join(dir, name);
  writeFileSync(p, text, "utf8");
  return p;
}

describe("readTable", () => {
  it("parses a scan export with every column numeric", () => {
    const t = readTable(join(FIXTURES, "scan_lattice.csv"), SCAN_COLUMNS);
    expect(t.columns).toEqual([...SCAN_COLUMNS]);
    expect(t.rows.length).toBe(6);
    for (const row of t.rows) {
      expect(row.length).toBe(SCAN_COLUMNS.length);
      for (const v of row) expect(Number.isFinite(v)).toBe(true);
    }
    // Fractions from one replicate-averaged sweep sum to one.
    for (const row of t.rows) {
      expect(row[1]! + row[2]! + row[3]!).toBeCloseTo(1, 9);
    }
  });

  it("parses a trajectory export", () => {
    const t = readTable(join(FIXTURES, "traj_q.csv"), TRAJECTORY_COLUMNS);
    expect(t.rows.length).toBeGreaterThan(10);
    const tcol = column(t, "t");
    for (let i = 1; i < tcol.length; i++) {
      expect(tcol[i]!).toBeGreaterThan(tcol[i - 1]!);
    }
  });

  it("names missing and unexpected columns on header mismatch", () => {
    const path = join(FIXTURES, "bad_header.csv");
    expect(() => readTable(path, TRAJECTORY_COLUMNS)).toThrow(SchemaError);
    try {
      readTable(path, TRAJECTORY_COLUMNS);
    } catch (err) {
      const msg = (err as Error).message;
      expect(msg).toContain("header mismatch");
      expect(msg).toContain("rho_C");
      expect(msg).toContain("time");
      expect(msg).toContain(path);
    }
  });

  it("rejects reordered columns even when the names all match", () => {
    const p = tmpCsv(
      "reordered.csv",
      "t,rho_D,rho_C,rho_Q\n0,0.2,0.3,0.5\n",
    );
    expect(() => readTable(p, TRAJECTORY_COLUMNS)).toThrow(/header mismatch/);
  });

  it("points at the offending cell for non-numeric data", () => {
    const p = tmpCsv(
      "badcell.csv",
      "t,rho_C,rho_D,rho_Q\n0,0.1,oops,0.6\n",
    );
    expect(() => readTable(p, TRAJECTORY_COLUMNS)).toThrow(/rho_D/);
    expect(() => readTable(p, TRAJECTORY_COLUMNS)).toThrow(/row 2/);
  });

  it("rejects rows with the wrong field count", () => {
    const p = tmpCsv("short.csv", "t,rho_C,rho_D,rho_Q\n0,0.1,0.2\n");
    expect(() => readTable(p, TRAJECTORY_COLUMNS)).toThrow(SchemaError);
  });

  it("accepts a header-only file as an empty table", () => {
    const t = readTable(join(FIXTURES, "empty_grid.csv"), PHASE_COLUMNS);
    expect(t.rows).toEqual([]);
  });
});

describe("column", () => {
  it("extracts a named column", () => {
    const t = readTable(join(FIXTURES, "traj_flat.csv"), TRAJECTORY_COLUMNS);
    expect(column(t, "rho_C")).toEqual([0.2, 0.2, 0.2, 0.2]);
  });

  it("rejects unknown column names", () => {
    const t = readTable(join(FIXTURES, "traj_flat.csv"), TRAJECTORY_COLUMNS);
    expect(() => column(t, "nope")).toThrow(SchemaError);
  });
});
