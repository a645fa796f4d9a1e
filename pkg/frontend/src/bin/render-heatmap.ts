#!/usr/bin/env node
/** Render a (gamma, r) phase grid CSV as a heatmap SVG or PNG. */

import { parseArgs } from "node:util";

import { SchemaError } from "../csv.js";
import { renderHeatmap } from "../heatmap.js";
import { checkFormat, emit, parseSize, runMain } from "./common.js";

runMain(() => {
  const { values, positionals } = parseArgs({
    options: {
      out: { type: "string" },
      boundary: { type: "string" },
      format: { type: "string", default: "svg" },
      width: { type: "string" },
      height: { type: "string" },
    },
    allowPositionals: true,
  });
  if (positionals.length !== 1) {
    throw new SchemaError(
      "usage: alvlab-render-heatmap <grid.csv> --out FILE " +
        "[--boundary FILE] [--format svg|png] [--width N] [--height N]",
    );
  }
  if (values.out === undefined) {
    throw new SchemaError("--out is required");
  }
  const format = checkFormat(values.format!);
  emit({ out: values.out, format }, (svgOut) =>
    renderHeatmap({
      gridCsv: positionals[0]!,
      boundaryJson: values.boundary,
      out: svgOut,
      width: parseSize("width", values.width),
      height: parseSize("height", values.height),
    }),
  );
});
