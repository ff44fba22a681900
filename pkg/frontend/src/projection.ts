/**
 * Projection scatterplot: all documents' 2-D coordinates with non-matching
 * points dimmed, a single-value color picker with legend, and a box
 * selection that becomes an explicit doc_id-set predicate.
 */

import type { AttributeInfo, ProjectionPoint } from "./types.js";
import { el, svgEl } from "./util.js";

export const PROJ_SIZE = 240;
const PROJ_PAD = 10;

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export interface ProjectionOptions {
  colorAttribute: string | null;
  colorChoices: AttributeInfo[];
  onColorChange(attribute: string | null): void;
  onRegionSelect(docIds: number[] | null): void;
}

export function renderProjection(points: ProjectionPoint[], opts: ProjectionOptions): HTMLElement {
  const root = el("div", "projection");

  const picker = el("select", "color-picker") as HTMLSelectElement;
  const none = el("option", undefined, "no color");
  none.setAttribute("value", "");
  picker.appendChild(none);
  for (const attr of opts.colorChoices) {
    const option = el("option", undefined, attr.name);
    option.setAttribute("value", attr.name);
    if (attr.name === opts.colorAttribute) option.setAttribute("selected", "selected");
    picker.appendChild(option);
  }
  picker.value = opts.colorAttribute ?? "";
  picker.addEventListener("change", () => opts.onColorChange(picker.value || null));
  root.appendChild(picker);

  const svg = svgEl("svg", { width: PROJ_SIZE, height: PROJ_SIZE, class: "projection-svg" });

  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const xLo = Math.min(...xs, 0);
  const xHi = Math.max(...xs, 0);
  const yLo = Math.min(...ys, 0);
  const yHi = Math.max(...ys, 0);
  const xSpan = xHi - xLo || 1;
  const ySpan = yHi - yLo || 1;
  const sx = (x: number) => PROJ_PAD + ((x - xLo) / xSpan) * (PROJ_SIZE - 2 * PROJ_PAD);
  const sy = (y: number) => PROJ_SIZE - PROJ_PAD - ((y - yLo) / ySpan) * (PROJ_SIZE - 2 * PROJ_PAD);

  const colorFor = buildColorScale(points, opts.colorAttribute);
  for (const p of points) {
    const circle = svgEl("circle", {
      class: p.selected ? "proj-point" : "proj-point dim",
      cx: sx(p.x),
      cy: sy(p.y),
      r: 3,
      "data-doc-id": p.doc_id,
    });
    if (colorFor) circle.setAttribute("fill", colorFor(p.color_value));
    svg.appendChild(circle);
  }

  attachBoxSelect(svg, points, sx, sy, opts);
  root.appendChild(svg);

  if (colorFor) {
    root.appendChild(renderLegend(points, colorFor));
  }
  return root;
}

function buildColorScale(
  points: ProjectionPoint[],
  colorAttribute: string | null,
): ((v: unknown) => string) | null {
  if (colorAttribute === null) return null;
  const seen: unknown[] = [];
  for (const p of points) {
    if (p.color_value !== null && p.color_value !== undefined && !seen.includes(p.color_value)) {
      seen.push(p.color_value);
    }
  }
  seen.sort((a, b) => String(a).localeCompare(String(b)));
  return (v: unknown) => {
    if (v === null || v === undefined) return "#cccccc";
    return PALETTE[seen.indexOf(v) % PALETTE.length];
  };
}

function renderLegend(points: ProjectionPoint[], colorFor: (v: unknown) => string): HTMLElement {
  const legend = el("div", "legend");
  const seen: unknown[] = [];
  for (const p of points) {
    if (p.color_value !== null && p.color_value !== undefined && !seen.includes(p.color_value)) {
      seen.push(p.color_value);
    }
  }
  seen.sort((a, b) => String(a).localeCompare(String(b)));
  for (const v of seen) {
    const item = el("span", "legend-item", String(v));
    const swatch = el("span", "legend-swatch");
    swatch.style.backgroundColor = colorFor(v);
    item.prepend(swatch);
    legend.appendChild(item);
  }
  return legend;
}

function attachBoxSelect(
  svg: SVGSVGElement,
  points: ProjectionPoint[],
  sx: (x: number) => number,
  sy: (y: number) => number,
  opts: ProjectionOptions,
): void {
  const box = svgEl("rect", { class: "select-box", x: 0, y: 0, width: 0, height: 0 });
  svg.appendChild(box);
  let start: [number, number] | null = null;

  const local = (ev: MouseEvent): [number, number] => {
    const rect = svg.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  };

  svg.addEventListener("mousedown", (ev) => {
    start = local(ev);
    ev.preventDefault();
  });
  svg.addEventListener("mousemove", (ev) => {
    if (!start) return;
    const [x, y] = local(ev);
    box.setAttribute("x", String(Math.min(start[0], x)));
    box.setAttribute("y", String(Math.min(start[1], y)));
    box.setAttribute("width", String(Math.abs(x - start[0])));
    box.setAttribute("height", String(Math.abs(y - start[1])));
  });
  svg.addEventListener("mouseup", (ev) => {
    if (!start) return;
    const [x, y] = local(ev);
    const [x0, y0] = start;
    start = null;
    box.setAttribute("width", "0");
    box.setAttribute("height", "0");
    if (Math.abs(x - x0) < 3 && Math.abs(y - y0) < 3) {
      opts.onRegionSelect(null); // plain click clears the region selection
      return;
    }
    const [lo, hi] = [Math.min(x0, x), Math.max(x0, x)];
    const [top, bottom] = [Math.min(y0, y), Math.max(y0, y)];
    const ids = points
      .filter((p) => sx(p.x) >= lo && sx(p.x) <= hi && sy(p.y) >= top && sy(p.y) <= bottom)
      .map((p) => p.doc_id);
    opts.onRegionSelect(ids);
  });
}
