/**
 * Sidebar chart renderers: bar charts for categorical attributes, brushable
 * histograms for quantitative ones, brushable period series for temporal
 * ones. Chart kind is a pure function of the attribute's data type; the
 * caller dispatches on the summary's `type`.
 *
 * Brush drags are debounced (BRUSH_DEBOUNCE_MS) so request rate stays
 * bounded while dragging; releasing the mouse commits immediately.
 */

import type { BarsSummary, BinsSummary, SeriesSummary } from "./types.js";
import { clamp, debounce, el, svgEl } from "./util.js";

export const CHART_WIDTH = 260;
export const CHART_HEIGHT = 90;
export const CHART_PAD = 6;
export const BRUSH_DEBOUNCE_MS = 100;

/** Minimum drag distance (px) before a mousedown counts as a brush rather
 * than a click that clears the existing brush. */
const DRAG_THRESHOLD = 3;

export interface BarChartOptions {
  isSelected(value: string | number): boolean;
  onToggle(value: string | number): void;
}

export function renderBarChart(summary: BarsSummary, opts: BarChartOptions): HTMLElement {
  const root = el("div", "chart bars");
  root.dataset.attr = summary.attribute;
  const max = summary.rows.reduce((m, [, c]) => Math.max(m, c), 0);
  for (const [value, count] of summary.rows) {
    const row = el("div", "bar-row");
    row.dataset.value = String(value);
    if (opts.isSelected(value)) row.classList.add("selected");
    row.appendChild(el("span", "bar-label", String(value)));
    const track = el("div", "bar-track");
    const fill = el("div", "bar-fill");
    fill.style.width = max > 0 ? `${(100 * count) / max}%` : "0";
    track.appendChild(fill);
    row.appendChild(track);
    row.appendChild(el("span", "bar-count", String(count)));
    row.addEventListener("click", () => opts.onToggle(value));
    root.appendChild(row);
  }
  if (summary.total_distinct > summary.rows.length) {
    root.appendChild(
      el("div", "bar-more", `… ${summary.total_distinct - summary.rows.length} more`),
    );
  }
  return root;
}

export interface BrushChartOptions<T> {
  brush: [T, T] | null;
  onBrush(lo: T | null, hi: T | null): void;
}

interface BrushScale<T> {
  /** Pixel x (within the svg) to a domain value. */
  invert(x: number): T;
  /** Domain value to pixel x, for drawing the active brush extent. */
  position(v: T): number;
}

/** Shared drag handling: overlay rect + debounced live updates + commit on
 * mouseup; a sub-threshold click clears the brush. */
function attachBrush<T>(
  svg: SVGSVGElement,
  scale: BrushScale<T>,
  opts: BrushChartOptions<T>,
): void {
  const overlay = svgEl("rect", {
    class: "brush-overlay",
    y: 0,
    height: CHART_HEIGHT,
    x: 0,
    width: 0,
  });
  if (opts.brush) {
    const [lo, hi] = opts.brush;
    const x0 = scale.position(lo);
    const x1 = scale.position(hi);
    overlay.setAttribute("x", String(Math.min(x0, x1)));
    overlay.setAttribute("width", String(Math.abs(x1 - x0)));
  }
  svg.appendChild(overlay);

  const live = debounce((lo: T, hi: T) => opts.onBrush(lo, hi), BRUSH_DEBOUNCE_MS);
  let dragStart: number | null = null;

  const localX = (ev: MouseEvent) => ev.clientX - svg.getBoundingClientRect().left;

  svg.addEventListener("mousedown", (ev) => {
    dragStart = localX(ev);
    ev.preventDefault();
  });
  svg.addEventListener("mousemove", (ev) => {
    if (dragStart === null) return;
    const x = localX(ev);
    overlay.setAttribute("x", String(Math.min(dragStart, x)));
    overlay.setAttribute("width", String(Math.abs(x - dragStart)));
    if (Math.abs(x - dragStart) >= DRAG_THRESHOLD) {
      const [a, b] = dragStart <= x ? [dragStart, x] : [x, dragStart];
      live(scale.invert(a), scale.invert(b));
    }
  });
  svg.addEventListener("mouseup", (ev) => {
    if (dragStart === null) return;
    const x = localX(ev);
    const start = dragStart;
    dragStart = null;
    live.cancel();
    if (Math.abs(x - start) < DRAG_THRESHOLD) {
      overlay.setAttribute("width", "0");
      opts.onBrush(null, null);
      return;
    }
    const [a, b] = start <= x ? [start, x] : [x, start];
    opts.onBrush(scale.invert(a), scale.invert(b));
  });
}

export function renderHistogram(
  summary: BinsSummary,
  opts: BrushChartOptions<number>,
): HTMLElement {
  const root = el("div", "chart histogram");
  root.dataset.attr = summary.attribute;
  const svg = svgEl("svg", {
    width: CHART_WIDTH,
    height: CHART_HEIGHT,
    class: "histogram-svg",
  });
  const innerW = CHART_WIDTH - 2 * CHART_PAD;
  const lo = summary.edges[0];
  const hi = summary.edges[summary.edges.length - 1];
  const n = summary.counts.length;
  const maxCount = summary.counts.reduce((m, c) => Math.max(m, c), 0);
  const binW = n > 0 ? innerW / n : innerW;
  for (let i = 0; i < n; i++) {
    const h = maxCount > 0 ? ((CHART_HEIGHT - 10) * summary.counts[i]) / maxCount : 0;
    svg.appendChild(
      svgEl("rect", {
        class: "hist-bin",
        x: CHART_PAD + i * binW,
        y: CHART_HEIGHT - h,
        width: Math.max(binW - 1, 1),
        height: h,
        "data-count": summary.counts[i],
      }),
    );
  }
  const span = hi - lo;
  attachBrush<number>(svg, {
    invert: (x) => {
      if (span <= 0) return lo;
      return lo + (clamp(x, CHART_PAD, CHART_PAD + innerW) - CHART_PAD) * (span / innerW);
    },
    position: (v) => (span <= 0 ? CHART_PAD : CHART_PAD + ((v - lo) / span) * innerW),
  }, opts);
  root.appendChild(svg);
  return root;
}

export function renderSeries(
  summary: SeriesSummary,
  opts: BrushChartOptions<number | string>,
): HTMLElement {
  const root = el("div", "chart series");
  root.dataset.attr = summary.attribute;
  const svg = svgEl("svg", { width: CHART_WIDTH, height: CHART_HEIGHT, class: "series-svg" });
  const innerW = CHART_WIDTH - 2 * CHART_PAD;
  const n = summary.timestamps.length;
  const step = n > 1 ? innerW / (n - 1) : 0;
  const maxCount = summary.counts.reduce((m, c) => Math.max(m, c), 0);
  const xAt = (i: number) => CHART_PAD + i * step;
  const yAt = (c: number) =>
    maxCount > 0 ? CHART_HEIGHT - 10 - ((CHART_HEIGHT - 20) * c) / maxCount : CHART_HEIGHT - 10;

  if (n > 0) {
    const pointsAttr = summary.counts.map((c, i) => `${xAt(i)},${yAt(c)}`).join(" ");
    svg.appendChild(svgEl("polyline", { class: "series-line", points: pointsAttr, fill: "none" }));
    summary.counts.forEach((c, i) => {
      svg.appendChild(
        svgEl("circle", {
          class: "series-point",
          cx: xAt(i),
          cy: yAt(c),
          r: 2,
          "data-label": String(summary.timestamps[i]),
          "data-count": c,
        }),
      );
    });
  }

  const indexAt = (x: number) => {
    if (n <= 1 || step === 0) return 0;
    return clamp(Math.round((x - CHART_PAD) / step), 0, n - 1);
  };
  attachBrush<number | string>(svg, {
    invert: (x) => summary.timestamps[indexAt(x)],
    position: (v) => {
      const i = summary.timestamps.indexOf(v);
      return xAt(i < 0 ? 0 : i);
    },
  }, opts);
  root.appendChild(svg);
  return root;
}
