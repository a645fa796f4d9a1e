#!/usr/bin/env node
/** Render one integration trajectory CSV as fraction-vs-time lines. */

import { parseArgs } from "node:util";

import { SchemaError } from "../csv.js";
import { renderTrajectory } from "../trajectory.js";
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
  if (positionals.length !== 1) {
    throw new SchemaError(
      "usage: alvlab-render-trajectory <trajectory.csv> --out FILE " +
        "[--format svg|png] [--width N] [--height N]",
    );
  }
  if (values.out === undefined) {
    throw new SchemaError("--out is required");
  }
  const format = checkFormat(values.format!);
  emit({ out: values.out, format }, (svgOut) =>
    renderTrajectory({
      input: positionals[0]!,
      out: svgOut,
      width: parseSize("width", values.width),
      height: parseSize("height", values.height),
    }),
  );
});
