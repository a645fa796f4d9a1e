/** Minimal deterministic SVG assembly: fixed style parameters, no
 * timestamps, text-identical output for identical inputs. */

import { scaleLinear, type ScaleLinear } from "d3-scale";

export type Scale = ScaleLinear<number, number>;

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const PLOT_FONT = "12px sans-serif";

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function attrString(attrs: Record<string, string | number>): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
}

/** Numbers in attributes: fixed short form so output is reproducible. */
export function num(x: number): string {
  const rounded = Math.round(x * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  open(tag: string, attrs: Record<string, string | number> = {}): void {
    this.parts.push(`<${tag}${attrString(attrs)}>`);
  }

  close(tag: string): void {
    this.parts.push(`</${tag}>`);
  }

  element(tag: string, attrs: Record<string, string | number> = {}): void {
    this.parts.push(`<${tag}${attrString(attrs)}/>`);
  }

  text(
    x: number,
    y: number,
    content: string,
    attrs: Record<string, string | number> = {},
  ): void {
    this.parts.push(
      `<text x="${num(x)}" y="${num(y)}"${attrString(attrs)}>` +
        `${escapeText(content)}</text>`,
    );
  }

  polyline(
    points: Array<[number, number]>,
    attrs: Record<string, string | number>,
  ): void {
    const pts = points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
    this.element("polyline", { points: pts, fill: "none", ...attrs });
  }

  polygon(
    points: Array<[number, number]>,
    attrs: Record<string, string | number>,
  ): void {
    const pts = points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
    this.element("polygon", { points: pts, ...attrs });
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" ` +
      `width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}" ` +
      `font-family="sans-serif" font-size="12">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export function makeScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  return scaleLinear().domain(domain).range(range);
}

const TICK = 5;

export function axisBottom(
  doc: SvgDoc,
  scale: Scale,
  y: number,
  label: string,
): void {
  const [x0, x1] = scale.range() as [number, number];
  doc.open("g", { class: "axis axis-x", stroke: "black" });
  doc.element("line", { x1: num(x0), y1: num(y), x2: num(x1), y2: num(y) });
  for (const t of scale.ticks(6)) {
    const x = scale(t);
    doc.element("line", {
      x1: num(x), y1: num(y), x2: num(x), y2: num(y + TICK),
    });
    doc.text(x, y + TICK + 12, tickLabel(t), {
      "text-anchor": "middle", stroke: "none",
    });
  }
  doc.text((x0 + x1) / 2, y + TICK + 30, label, {
    "text-anchor": "middle", stroke: "none",
  });
  doc.close("g");
}

export function axisLeft(
  doc: SvgDoc,
  scale: Scale,
  x: number,
  label: string,
): void {
  const [y0, y1] = scale.range() as [number, number];
  doc.open("g", { class: "axis axis-y", stroke: "black" });
  doc.element("line", { x1: num(x), y1: num(y0), x2: num(x), y2: num(y1) });
  for (const t of scale.ticks(6)) {
    const y = scale(t);
    doc.element("line", {
      x1: num(x - TICK), y1: num(y), x2: num(x), y2: num(y),
    });
    doc.text(x - TICK - 3, y + 4, tickLabel(t), {
      "text-anchor": "end", stroke: "none",
    });
  }
  doc.raw(
    `<text transform="translate(${num(x - 42)},${num((y0 + y1) / 2)}) ` +
      `rotate(-90)" text-anchor="middle">${escapeText(label)}</text>`,
  );
  doc.close("g");
}

export function tickLabel(t: number): string {
  if (t === 0) return "0";
  const abs = Math.abs(t);
  if (abs >= 1000 || abs < 0.001) return t.toExponential(1);
  return String(Math.round(t * 1000) / 1000);
}

/** Vertical color legend mapping [0, 1] through `colorOf`. */
export function colorLegend(
  doc: SvgDoc,
  colorOf: (v: number) => string,
  x: number,
  top: number,
  height: number,
  label: string,
): void {
  const steps = 64;
  doc.open("g", { class: "legend" });
  for (let i = 0; i < steps; i++) {
    const v0 = i / steps;
    doc.element("rect", {
      x: num(x),
      y: num(top + height * (1 - (i + 1) / steps)),
      width: 12,
      height: num(height / steps + 0.5),
      fill: colorOf(v0),
    });
  }
  for (const v of [0, 0.5, 1]) {
    const y = top + height * (1 - v);
    doc.text(x + 16, y + 4, tickLabel(v), { "text-anchor": "start" });
  }
  doc.raw(
    `<text transform="translate(${num(x + 40)},${num(top + height / 2)}) ` +
      `rotate(-90)" text-anchor="middle">${escapeText(label)}</text>`,
  );
  doc.close("g");
}

export const SERIES_STYLE: Record<string, { color: string; label: string }> = {
  C: { color: "#4477aa", label: "rho_C" },
  D: { color: "#cc3311", label: "rho_D" },
  Q: { color: "#228833", label: "rho_Q" },
};
