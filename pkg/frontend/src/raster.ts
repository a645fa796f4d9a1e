/** PNG export delegates to whatever SVG rasterizer the host provides.
 * Keeping this out-of-process avoids a native canvas dependency. */

import { spawnSync } from "node:child_process";

const CONVERTERS: Array<{ cmd: string; args: (svg: string, png: string) => string[] }> = [
  { cmd: "rsvg-convert", args: (svg, png) => ["-o", png, svg] },
  { cmd: "magick", args: (svg, png) => [svg, png] },
  { cmd: "convert", args: (svg, png) => [svg, png] },
];

export class RasterError extends Error {}

/** Convert an SVG file to PNG, trying known converters in order. */
export function svgToPng(svgPath: string, pngPath: string): string {
  const tried: string[] = [];
  for (const { cmd, args } of CONVERTERS) {
    const res = spawnSync(cmd, args(svgPath, pngPath), { stdio: "pipe" });
    if (res.error !== undefined) {
      tried.push(cmd);
      continue;
    }
    if (res.status === 0) return cmd;
    throw new RasterError(
      `${cmd} failed with exit status ${res.status}: ` +
        `${res.stderr?.toString().trim() ?? ""}`,
    );
  }
  throw new RasterError(
    `no SVG rasterizer found on PATH (tried ${tried.join(", ")}); ` +
      `install librsvg or ImageMagick, or use --format svg`,
  );
}
