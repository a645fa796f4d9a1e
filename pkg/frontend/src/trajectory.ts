/** Time-series view of one integration run: the three strategy
 * fractions against t on a fixed [0, 1] vertical axis. */

import { writeFileSync } from "node:fs";
import { basename } from "node:path";

import { TRAJECTORY_COLUMNS, SchemaError, column, readTable } from "./csv.js";
import {
  SERIES_STYLE,
  SvgDoc,
  axisBottom,
  axisLeft,
  makeScale,
  num,
} from "./svg.js";
import type { RenderResult } from "./heatmap.js";

export interface TrajectoryOptions {
  input: string;
  out: string;
  width?: number;
  height?: number;
}

export function renderTrajectory(opts: TrajectoryOptions): RenderResult {
  const table = readTable(opts.input, TRAJECTORY_COLUMNS);
  if (table.rows.length === 0) {
    throw new SchemaError(`${opts.input}: trajectory is empty, nothing to draw`);
  }

  const width = opts.width ?? 720;
  const height = opts.height ?? 420;
  const margin = { top: 36, right: 24, bottom: 56, left: 64 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const t = column(table, "t");
  const tMin = Math.min(...t);
  const tMax = Math.max(...t);
  // Degenerate time span (single sample): pad so the axis still draws.
  const pad = tMax > tMin ? 0 : Math.max(1, Math.abs(tMax));
  const x = makeScale(
    [tMin - (tMax > tMin ? 0 : pad), tMax + (tMax > tMin ? 0 : pad)],
    [margin.left, margin.left + plotW],
  );
  const y = makeScale([0, 1], [margin.top + plotH, margin.top]);

  const doc = new SvgDoc(width, height);
  doc.element("rect", { x: 0, y: 0, width, height, fill: "white" });
  doc.text(margin.left, 22, basename(opts.input), { "font-size": 14 });

  const singlePoint = table.rows.length === 1;
  for (const s of ["C", "D", "Q"] as const) {
    const vals = column(table, `rho_${s}`);
    const st = SERIES_STYLE[s]!;
    if (singlePoint) {
      doc.element("circle", {
        class: `marker-${s}`,
        cx: num(x(t[0]!)),
        cy: num(y(vals[0]!)),
        r: 4,
        fill: st.color,
      });
    } else {
      const pts = t.map((tv, i): [number, number] => [x(tv), y(vals[i]!)]);
      doc.polyline(pts, {
        class: `line-${s}`,
        stroke: st.color,
        "stroke-width": 2,
      });
    }
  }

  axisBottom(doc, x, margin.top + plotH, "t");
  axisLeft(doc, y, margin.left, "strategy fraction");

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
