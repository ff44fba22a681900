import { describe, expect, it, vi } from "vitest";

import {
  CHART_PAD,
  CHART_WIDTH,
  renderBarChart,
  renderHistogram,
  renderSeries,
} from "../src/charts.js";
import type { BarsSummary, BinsSummary, SeriesSummary } from "../src/types.js";

const WORD_BARS: BarsSummary = {
  type: "bars",
  attribute: "word",
  rows: [
    ["data", 5],
    ["analysis", 2],
    ["drawing", 1],
  ],
  total_distinct: 14,
};

function mouse(type: string, clientX: number, clientY = 10): MouseEvent {
  return new MouseEvent(type, { clientX, clientY, bubbles: true });
}

describe("renderBarChart", () => {
  it("renders one row per bar with counts and selection decoration", () => {
    const chart = renderBarChart(WORD_BARS, {
      isSelected: (v) => v === "data",
      onToggle: () => {},
    });
    const rows = chart.querySelectorAll(".bar-row");
    expect(rows).toHaveLength(3);
    expect(rows[0].textContent).toContain("data");
    expect(rows[0].textContent).toContain("5");
    expect(rows[0].classList.contains("selected")).toBe(true);
    expect(rows[1].classList.contains("selected")).toBe(false);
    expect(chart.querySelector(".bar-more")?.textContent).toContain("11 more");
  });

  it("clicking a bar reports its value", () => {
    const onToggle = vi.fn();
    const chart = renderBarChart(WORD_BARS, { isSelected: () => false, onToggle });
    (chart.querySelector('[data-value="analysis"]') as HTMLElement).dispatchEvent(
      mouse("click", 0),
    );
    expect(onToggle).toHaveBeenCalledWith("analysis");
  });
});

describe("renderHistogram", () => {
  const BINS: BinsSummary = {
    type: "bins",
    attribute: "score",
    edges: [0, 0.25, 0.5, 0.75, 1],
    counts: [1, 2, 0, 3],
  };

  it("renders one rect per bin", () => {
    const chart = renderHistogram(BINS, { brush: null, onBrush: () => {} });
    const rects = chart.querySelectorAll(".hist-bin");
    expect(rects).toHaveLength(4);
    expect(rects[3].getAttribute("data-count")).toBe("3");
  });

  it("a drag commits a range mapped through the unfiltered extent", () => {
    const onBrush = vi.fn();
    const chart = renderHistogram(BINS, { brush: null, onBrush });
    const svg = chart.querySelector("svg")!;
    const innerW = CHART_WIDTH - 2 * CHART_PAD;
    svg.dispatchEvent(mouse("mousedown", CHART_PAD));
    svg.dispatchEvent(mouse("mousemove", CHART_PAD + innerW / 2));
    svg.dispatchEvent(mouse("mouseup", CHART_PAD + innerW / 2));
    expect(onBrush).toHaveBeenCalledTimes(1);
    const [lo, hi] = onBrush.mock.calls[0];
    expect(lo).toBeCloseTo(0, 6);
    expect(hi).toBeCloseTo(0.5, 6);
  });

  it("a sub-threshold click clears the brush", () => {
    const onBrush = vi.fn();
    const chart = renderHistogram(BINS, { brush: [0.2, 0.8], onBrush });
    const svg = chart.querySelector("svg")!;
    svg.dispatchEvent(mouse("mousedown", 100));
    svg.dispatchEvent(mouse("mouseup", 101));
    expect(onBrush).toHaveBeenCalledWith(null, null);
  });
});

describe("renderSeries", () => {
  const SERIES: SeriesSummary = {
    type: "series",
    attribute: "year",
    timestamps: [2015, 2016, 2017],
    counts: [1, 2, 1],
  };

  it("renders the line and one labeled point per period", () => {
    const chart = renderSeries(SERIES, { brush: null, onBrush: () => {} });
    expect(chart.querySelector(".series-line")).not.toBeNull();
    const points = chart.querySelectorAll(".series-point");
    expect(points).toHaveLength(3);
    expect(points[1].getAttribute("data-label")).toBe("2016");
    expect(points[1].getAttribute("data-count")).toBe("2");
  });

  it("a drag snaps to period labels", () => {
    const onBrush = vi.fn();
    const chart = renderSeries(SERIES, { brush: null, onBrush });
    const svg = chart.querySelector("svg")!;
    const step = (CHART_WIDTH - 2 * CHART_PAD) / 2;
    svg.dispatchEvent(mouse("mousedown", CHART_PAD));
    svg.dispatchEvent(mouse("mousemove", CHART_PAD + step));
    svg.dispatchEvent(mouse("mouseup", CHART_PAD + step));
    expect(onBrush).toHaveBeenCalledWith(2015, 2016);
  });
});
