/** Shared command-line plumbing for the render executables. */

import { unlinkSync } from "node:fs";

import { SchemaError } from "../csv.js";
import type { RenderResult } from "../heatmap.js";
import { svgToPng } from "../raster.js";

export interface OutputChoice {
  out: string;
  format: "svg" | "png";
}

export function checkFormat(value: string): "svg" | "png" {
  if (value !== "svg" && value !== "png") {
    throw new SchemaError(`unknown --format "${value}"; expected svg or png`);
  }
  return value;
}

export function parseSize(
  name: string,
  value: string | undefined,
): number | undefined {
  if (value === undefined) return undefined;
  const n = Number(value);
  if (!Number.isFinite(n) || n <= 0 || !Number.isInteger(n)) {
    throw new SchemaError(`--${name} must be a positive integer, got "${value}"`);
  }
  return n;
}

/** Render to SVG, optionally rasterize, report warnings on stderr. */
export function emit(
  choice: OutputChoice,
  render: (svgOut: string) => RenderResult,
): void {
  const svgPath =
    choice.format === "svg" ? choice.out : `${choice.out}.tmp.svg`;
  const result = render(svgPath);
  for (const w of result.warnings) {
    process.stderr.write(`warning: ${w}\n`);
  }
  if (choice.format === "png") {
    try {
      svgToPng(svgPath, choice.out);
    } finally {
      try {
        unlinkSync(svgPath);
      } catch {
        // temp file already gone
      }
    }
  }
  process.stdout.write(`wrote ${choice.out}\n`);
}

export function runMain(fn: () => void): void {
  try {
    fn();
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: ${msg}\n`);
    process.exitCode = 1;
  }
}
