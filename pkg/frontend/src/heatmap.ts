/** Phase-diagram heatmap: rho_Q over the (gamma, r) grid, with an
 * optional analytic boundary overlay read from a sidecar JSON file. */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";
import { interpolateViridis } from "d3-scale-chromatic";

import { PHASE_COLUMNS, SchemaError, column, readTable } from "./csv.js";
import {
  SvgDoc,
  axisBottom,
  axisLeft,
  colorLegend,
  makeScale,
  num,
} from "./svg.js";

export interface HeatmapOptions {
  gridCsv: string;
  boundaryJson?: string;
  out: string;
  width?: number;
  height?: number;
}

export interface RenderResult {
  out: string;
  warnings: string[];
}

interface BoundarySample {
  gamma: number;
  r: number;
}

function sortedUnique(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function readBoundary(path: string, warnings: string[]): BoundarySample[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    warnings.push(`boundary file not readable: ${path}; overlay skipped`);
    return [];
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch {
    warnings.push(`boundary file is not valid JSON: ${path}; overlay skipped`);
    return [];
  }
  const entries = Array.isArray(parsed)
    ? parsed
    : (parsed as { boundary?: unknown }).boundary;
  if (!Array.isArray(entries)) {
    warnings.push(
      `boundary file has no sample array: ${path}; overlay skipped`,
    );
    return [];
  }
  const out: BoundarySample[] = [];
  for (const e of entries) {
    const g = Number((e as { gamma?: unknown }).gamma);
    const r = Number((e as { r_star?: unknown }).r_star);
    if (Number.isFinite(g) && Number.isFinite(r)) out.push({ gamma: g, r });
  }
  if (out.length === 0 && entries.length > 0) {
    warnings.push(
      `boundary file has no usable {gamma, r_star} samples: ${path}; ` +
        `overlay skipped`,
    );
  }
  out.sort((a, b) => a.gamma - b.gamma);
  return out;
}

export function renderHeatmap(opts: HeatmapOptions): RenderResult {
  const warnings: string[] = [];
  const table = readTable(opts.gridCsv, PHASE_COLUMNS);
  if (table.rows.length === 0) {
    throw new SchemaError(`${opts.gridCsv}: grid is empty, nothing to draw`);
  }

  const gammas = sortedUnique(column(table, "gamma"));
  const rs = sortedUnique(column(table, "r"));

  // Index every (gamma, r) pair; a grid export is complete by contract.
  const cell = new Map<string, { rhoQ: number; converged: boolean }>();
  const gi = new Map(gammas.map((g, i) => [g, i]));
  const ri = new Map(rs.map((r, i) => [r, i]));
  for (const row of table.rows) {
    const [g, r, , , rhoQ, conv] = row as [
      number, number, number, number, number, number,
    ];
    cell.set(`${gi.get(g)},${ri.get(r)}`, {
      rhoQ,
      converged: conv !== 0,
    });
  }
  if (cell.size !== gammas.length * rs.length) {
    throw new SchemaError(
      `${opts.gridCsv}: incomplete grid; ` +
        `${gammas.length} gamma x ${rs.length} r values ` +
        `but only ${cell.size} distinct cells`,
    );
  }

  const width = opts.width ?? 720;
  const height = opts.height ?? 540;
  const margin = { top: 36, right: 96, bottom: 56, left: 64 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  // Cell edges at midpoints between grid values, clamped at the rim.
  const xEdges = edges(gammas);
  const yEdges = edges(rs);
  const x = makeScale(
    [xEdges[0]!, xEdges[xEdges.length - 1]!],
    [margin.left, margin.left + plotW],
  );
  const y = makeScale(
    [yEdges[0]!, yEdges[yEdges.length - 1]!],
    [margin.top + plotH, margin.top],
  );

  const doc = new SvgDoc(width, height);
  doc.raw(
    `<defs><pattern id="unconverged" width="6" height="6" ` +
      `patternUnits="userSpaceOnUse" patternTransform="rotate(45)">` +
      `<line x1="0" y1="0" x2="0" y2="6" stroke="white" ` +
      `stroke-width="1.5" stroke-opacity="0.85"/></pattern></defs>`,
  );
  doc.element("rect", {
    x: 0, y: 0, width, height, fill: "white",
  });
  doc.text(margin.left, 22, `fraction Q : ${basename(opts.gridCsv)}`, {
    "font-size": 14,
  });

  doc.open("g", { class: "cells" });
  for (let i = 0; i < gammas.length; i++) {
    for (let j = 0; j < rs.length; j++) {
      const c = cell.get(`${i},${j}`)!;
      const x0 = x(xEdges[i]!);
      const x1 = x(xEdges[i + 1]!);
      const y0 = y(yEdges[j + 1]!);
      const y1 = y(yEdges[j]!);
      const base: Record<string, string | number> = {
        x: num(x0),
        y: num(y0),
        width: num(x1 - x0),
        height: num(y1 - y0),
        fill: interpolateViridis(clamp01(c.rhoQ)),
      };
      doc.element("rect", base);
      if (!c.converged) {
        doc.element("rect", {
          ...base,
          fill: "url(#unconverged)",
          class: "unconverged",
        });
      }
    }
  }
  doc.close("g");

  if (opts.boundaryJson !== undefined) {
    const samples = readBoundary(opts.boundaryJson, warnings);
    const rLo = yEdges[0]!;
    const rHi = yEdges[yEdges.length - 1]!;
    const gLo = xEdges[0]!;
    const gHi = xEdges[xEdges.length - 1]!;
    const pts = samples
      .filter((s) => s.r >= rLo && s.r <= rHi)
      .map((s): [number, number] => [
        x(Math.min(gHi, Math.max(gLo, s.gamma))),
        y(s.r),
      ]);
    if (pts.length >= 2) {
      doc.polyline(pts, {
        class: "boundary",
        stroke: "white",
        "stroke-width": 2,
        "stroke-dasharray": "6 4",
      });
    } else if (samples.length > 0) {
      warnings.push(
        `boundary overlay skipped: no samples inside r range ` +
          `[${rLo}, ${rHi}]`,
      );
    }
  }

  axisBottom(doc, x, margin.top + plotH, "gamma");
  axisLeft(doc, y, margin.left, "r");
  colorLegend(
    doc,
    interpolateViridis,
    margin.left + plotW + 14,
    margin.top,
    plotH,
    "fraction Q",
  );

  writeFileSync(opts.out, doc.toString(), "utf8");
  return { out: opts.out, warnings };
}

function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

function edges(values: number[]): number[] {
  if (values.length === 1) {
    const v = values[0]!;
    const h = v === 0 ? 0.5 : Math.abs(v) * 0.05;
    return [v - h, v + h];
  }
  const out: number[] = [];
  out.push(values[0]! - (values[1]! - values[0]!) / 2);
  for (let i = 0; i + 1 < values.length; i++) {
    out.push((values[i]! + values[i + 1]!) / 2);
  }
  out.push(
    values[values.length - 1]! +
      (values[values.length - 1]! - values[values.length - 2]!) / 2,
  );
  return out;
}
