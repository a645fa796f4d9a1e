/** Strategy-fraction scans versus gamma, one panel per input file.
 * Panels keep their own gamma axes; files with different sweep ranges
 * are simply drawn side by side, never resampled onto a shared grid. */

import { writeFileSync } from "node:fs";
import { basename } from "node:path";

import { SCAN_COLUMNS, SchemaError, column, readTable } from "./csv.js";
import {
  SERIES_STYLE,
  SvgDoc,
  axisBottom,
  axisLeft,
  makeScale,
} from "./svg.js";
import type { RenderResult } from "./heatmap.js";

export interface ScanOptions {
  inputs: string[];
  out: string;
  width?: number;
  height?: number;
}

const PANEL_W = 320;

function stem(path: string): string {
  return basename(path).replace(/\.[^.]*$/, "");
}

export function renderScan(opts: ScanOptions): RenderResult {
  if (opts.inputs.length === 0) {
    throw new SchemaError("no input files given; need at least one scan CSV");
  }
  const tables = opts.inputs.map((p) => {
    const t = readTable(p, SCAN_COLUMNS);
    if (t.rows.length === 0) {
      throw new SchemaError(`${p}: scan is empty, nothing to draw`);
    }
    return { path: p, table: t };
  });

  const n = tables.length;
  const margin = { top: 40, right: 16, bottom: 56, left: 64 };
  const width = opts.width ?? margin.left + n * PANEL_W + margin.right;
  const height = opts.height ?? 320;
  const plotH = height - margin.top - margin.bottom;
  const innerW = (width - margin.left - margin.right) / n;

  const doc = new SvgDoc(width, height);
  doc.element("rect", { x: 0, y: 0, width, height, fill: "white" });

  tables.forEach(({ path, table }, k) => {
    const left = margin.left + k * innerW;
    const gamma = column(table, "gamma");
    const x = makeScale(
      [Math.min(...gamma), Math.max(...gamma)],
      [left + 8, left + innerW - 24],
    );
    const y = makeScale([0, 1], [margin.top + plotH, margin.top]);

    doc.open("g", { class: "panel" });
    doc.text(left + innerW / 2, margin.top - 14, stem(path), {
      "text-anchor": "middle",
      "font-size": 13,
    });

    const meanQ = column(table, "mean_rho_Q");
    const seQ = column(table, "se_rho_Q");
    const band: Array<[number, number]> = [];
    gamma.forEach((g, i) => band.push([x(g), y(clip01(meanQ[i]! + seQ[i]!))]));
    for (let i = gamma.length - 1; i >= 0; i--) {
      band.push([x(gamma[i]!), y(clip01(meanQ[i]! - seQ[i]!))]);
    }
    doc.polygon(band, {
      class: "band-Q",
      fill: SERIES_STYLE["Q"]!.color,
      "fill-opacity": "0.18",
      stroke: "none",
    });

    for (const s of ["C", "D", "Q"] as const) {
      const means = column(table, `mean_rho_${s}`);
      const pts = gamma.map((g, i): [number, number] => [
        x(g),
        y(clip01(means[i]!)),
      ]);
      doc.polyline(pts, {
        class: `line-${s}`,
        stroke: SERIES_STYLE[s]!.color,
        "stroke-width": 2,
      });
    }

    axisBottom(doc, x, margin.top + plotH, "gamma");
    if (k === 0) axisLeft(doc, y, left, "strategy fraction");
    doc.close("g");
  });

  // Shared legend across panels: same three series everywhere.
  doc.open("g", { class: "plot-legend" });
  let lx = margin.left;
  for (const s of ["C", "D", "Q"] as const) {
    const st = SERIES_STYLE[s]!;
    doc.element("line", {
      x1: lx, y1: height - 14, x2: lx + 22, y2: height - 14,
      stroke: st.color, "stroke-width": 2,
    });
    doc.text(lx + 27, height - 10, st.label, {});
    lx += 100;
  }
  doc.close("g");

  writeFileSync(opts.out, doc.toString(), "utf8");
  return { out: opts.out, warnings: [] };
}

function clip01(v: number): number {
  return Math.min(1, Math.max(0, v));
}
