/** End-to-end checks of the compiled executables in dist/bin.
 * The test script builds before running, so dist is always current. */

import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

const ROOT = new URL("..", import.meta.url).pathname;
const FIXTURES = join(ROOT, "tests", "fixtures");
const BIN = join(ROOT, "dist", "bin");

function run(
  script: string,
  args: string[],
): { status: number; stdout: string; stderr: string } {
  const res = spawnSync("node", [join(BIN, script), ...args], {
    stdio: "pipe",
    encoding: "utf8",
  });
  return { status: res.status ?? -1, stdout: res.stdout, stderr: res.stderr };
}

function outDir(): string {
  return mkdtempSync(join(tmpdir(), "plots-bin-"));
}

describe("render executables", () => {
  it("heatmap: renders grid plus boundary and exits 0", () => {
    const out = join(outDir(), "phase.svg");
    const res = run("render-heatmap.js", [
      join(FIXTURES, "phase_small.csv"),
      "--boundary",
      join(FIXTURES, "phase_small_boundary.json"),
      "--out",
      out,
    ]);
    expect(res.status).toBe(0);
    expect(res.stdout).toContain(`wrote ${out}`);
    expect(readFileSync(out, "utf8")).toContain('class="boundary"');
  });

  it("heatmap: exits 1 with a diagnostic on an empty grid", () => {
    const out = join(outDir(), "phase.svg");
    const res = run("render-heatmap.js", [
      join(FIXTURES, "empty_grid.csv"),
      "--out",
      out,
    ]);
    expect(res.status).toBe(1);
    expect(res.stderr).toContain("empty");
    expect(existsSync(out)).toBe(false);
  });

  it("heatmap: exits 1 when --out is missing", () => {
    const res = run("render-heatmap.js", [join(FIXTURES, "phase_small.csv")]);
    expect(res.status).toBe(1);
    expect(res.stderr).toContain("--out is required");
  });

  it("heatmap: warns on stderr when the boundary file is missing", () => {
    const out = join(outDir(), "phase.svg");
    const res = run("render-heatmap.js", [
      join(FIXTURES, "phase_small.csv"),
      "--boundary",
      join(FIXTURES, "gone.json"),
      "--out",
      out,
    ]);
    expect(res.status).toBe(0);
    expect(res.stderr).toContain("warning:");
    expect(existsSync(out)).toBe(true);
  });

  it("scan: accepts several files and exits 0", () => {
    const out = join(outDir(), "scan.svg");
    const res = run("render-scan.js", [
      join(FIXTURES, "scan_lattice.csv"),
      join(FIXTURES, "scan_smallworld.csv"),
      join(FIXTURES, "scan_er.csv"),
      "--out",
      out,
    ]);
    expect(res.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect((svg.match(/class="panel"/g) ?? []).length).toBe(3);
  });

  it("scan: exits 1 on schema mismatch naming the file", () => {
    const res = run("render-scan.js", [
      join(FIXTURES, "bad_header.csv"),
      "--out",
      join(outDir(), "scan.svg"),
    ]);
    expect(res.status).toBe(1);
    expect(res.stderr).toContain("bad_header.csv");
    expect(res.stderr).toContain("header mismatch");
  });

  it("trajectory: renders and is byte-identical across runs", () => {
    const dir = outDir();
    const a = join(dir, "a.svg");
    const b = join(dir, "b.svg");
    for (const out of [a, b]) {
      const res = run("render-trajectory.js", [
        join(FIXTURES, "traj_q.csv"),
        "--out",
        out,
      ]);
      expect(res.status).toBe(0);
    }
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });

  it("trajectory: rejects an unknown --format", () => {
    const res = run("render-trajectory.js", [
      join(FIXTURES, "traj_q.csv"),
      "--out",
      join(outDir(), "t.gif"),
      "--format",
      "gif",
    ]);
    expect(res.status).toBe(1);
    expect(res.stderr).toContain('unknown --format "gif"');
  });

  it("trajectory: rejects a non-integer --width", () => {
    const res = run("render-trajectory.js", [
      join(FIXTURES, "traj_q.csv"),
      "--out",
      join(outDir(), "t.svg"),
      "--width",
      "12.5",
    ]);
    expect(res.status).toBe(1);
    expect(res.stderr).toContain("--width must be a positive integer");
  });

  it("png format either rasterizes or names the missing converter", () => {
    const out = join(outDir(), "t.png");
    const res = run("render-trajectory.js", [
      join(FIXTURES, "traj_q.csv"),
      "--out",
      out,
      "--format",
      "png",
    ]);
    if (res.status === 0) {
      // Converter available on this host: output must be a real PNG.
      const head = readFileSync(out).subarray(0, 4);
      expect([...head]).toEqual([0x89, 0x50, 0x4e, 0x47]);
    } else {
      expect(res.status).toBe(1);
      expect(res.stderr).toContain("no SVG rasterizer found");
      expect(existsSync(out)).toBe(false);
      // The intermediate SVG must not be left behind.
      expect(existsSync(`${out}.tmp.svg`)).toBe(false);
    }
  });
});
