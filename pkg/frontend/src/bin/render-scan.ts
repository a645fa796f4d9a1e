#!/usr/bin/env node
/** Render one or more scan CSVs as side-by-side fraction-vs-gamma panels. */

import { parseArgs } from "node:util";

import { SchemaError } from "../csv.js";
import { renderScan } from "../scan.js";
import { checkFormat, emit, parseSize, runMain } from "./common.js";

runMain(() => {
  const { values, positionals } = parseArgs({
    options: {
      out: { type: "string" },
      format: { type: "string", default: "svg" },
      width: { type: "string" },
      height: { type: "string" },
    },
    allowPositionals: true,
  });
  if (positionals.length === 0) {
    throw new SchemaError(
      "usage: alvlab-render-scan <scan.csv> [more.csv ...] --out FILE " +
        "[--format svg|png] [--width N] [--height N]",
    );
  }
  if (values.out === undefined) {
    throw new SchemaError("--out is required");
  }
  const format = checkFormat(values.format!);
  emit({ out: values.out, format }, (svgOut) =>
    renderScan({
      inputs: positionals,
      out: svgOut,
      width: parseSize("width", values.width),
      height: parseSize("height", values.height),
    }),
  );
});
