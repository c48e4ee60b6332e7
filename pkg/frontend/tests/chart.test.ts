import { describe, expect, it } from "vitest";

import { buildChart, formatTick, linePath, niceStep, niceTicks } from "../src/chart.js";
import type { ChartSpec } from "../src/types.js";

describe("niceStep", () => {
  it("picks from the 1/2/5 series", () => {
    expect(niceStep(10, 5)).toBe(2);
    expect(niceStep(100, 5)).toBe(20);
    expect(niceStep(7, 5)).toBe(1);
    expect(niceStep(0.5, 5)).toBe(0.1);
  });
});

describe("niceTicks", () => {
  it("covers the range at round values", () => {
    expect(niceTicks(0, 10)).toEqual([0, 2, 4, 6, 8, 10]);
    expect(niceTicks(3, 47)).toEqual([5, 10, 15, 20, 25, 30, 35, 40, 45]);
  });

  it("collapses a flat range to one tick", () => {
    expect(niceTicks(5, 5)).toEqual([5]);
  });

  it("keeps float labels clean", () => {
    for (const tick of niceTicks(0, 0.7)) {
      expect(String(tick).length).toBeLessThanOrEqual(4);
    }
  });
});

describe("formatTick", () => {
  it("prints integers bare and floats to two places", () => {
    expect(formatTick(40)).toBe("40");
    expect(formatTick(0.30000000000000004)).toBe("0.3");
    expect(formatTick(12.345)).toBe("12.35");
  });
});

describe("linePath", () => {
  const sx = (i: number) => i * 10;
  const sy = (v: number) => 100 - v;

  it("moves once then draws lines", () => {
    expect(linePath([1, 2, 3], sx, sy)).toBe("M0.00 99.00L10.00 98.00L20.00 97.00");
  });

  it("breaks the line at nulls", () => {
    expect(linePath([1, null, 3, 4], sx, sy)).toBe(
      "M0.00 99.00M20.00 97.00L30.00 96.00",
    );
  });

  it("is empty for all-null data", () => {
    expect(linePath([null, null], sx, sy)).toBe("");
  });
});

describe("buildChart", () => {
  const spec: ChartSpec = {
    kind: "chart",
    title: "t",
    unit: "%",
    x_label: "day",
    series: [
      { label: "a", x: ["d1", "d2", "d3", "d4"], y: [0, 5, null, 10] },
      { label: "b", x: ["d1", "d2", "d3", "d4"], y: [10, 10, 10, 10] },
    ],
  };

  it("spans the plot area from data extremes", () => {
    const geometry = buildChart(spec, 640, 280);
    expect(geometry.paths).toHaveLength(2);
    // series a starts at y=0 (plot bottom); after the null gap its last
    // point restarts with a move to y=10 (plot top)
    expect(geometry.paths[0].d.startsWith(`M${geometry.plot.left}.00 ${geometry.plot.bottom}.00`)).toBe(true);
    expect(geometry.paths[0].d.endsWith(`M${geometry.plot.right}.00 ${geometry.plot.top}.00`)).toBe(true);
  });

  it("aligns x ticks with first and last labels", () => {
    const geometry = buildChart(spec, 640, 280);
    expect(geometry.xTicks[0].label).toBe("d1");
    expect(geometry.xTicks[geometry.xTicks.length - 1].label).toBe("d4");
    expect(geometry.xTicks[0].x).toBe(geometry.plot.left);
    expect(geometry.xTicks[geometry.xTicks.length - 1].x).toBe(geometry.plot.right);
  });

  it("pads a flat series instead of dividing by zero", () => {
    const flat: ChartSpec = {
      ...spec,
      series: [{ label: "a", x: ["p", "q"], y: [3, 3] }],
    };
    const geometry = buildChart(flat, 640, 280);
    expect(geometry.paths[0].d).toContain("L");
    for (const tick of geometry.yTicks) {
      expect(Number.isFinite(tick.y)).toBe(true);
    }
  });

  it("survives an empty series list", () => {
    const empty: ChartSpec = { ...spec, series: [] };
    const geometry = buildChart(empty, 640, 280);
    expect(geometry.paths).toEqual([]);
    expect(geometry.xTicks).toEqual([]);
  });
});
