// Pure chart geometry: the view hands a visualization spec in and gets
// SVG path strings and tick positions back. Null y values break the
// line instead of interpolating through missing data.

import type { ChartSpec } from "./types.js";

export interface ChartGeometry {
  width: number;
  height: number;
  plot: { left: number; top: number; right: number; bottom: number };
  paths: Array<{ label: string; d: string }>;
  yTicks: Array<{ y: number; label: string }>;
  xTicks: Array<{ x: number; label: string }>;
}

const PAD = { left: 52, top: 12, right: 12, bottom: 28 };

/** Largest 1/2/5-series step not exceeding the raw interval. */
export function niceStep(span: number, target: number): number {
  const raw = span / Math.max(1, target);
  const magnitude = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const factor of [5, 2, 1]) {
    if (magnitude * factor <= raw) {
      return magnitude * factor;
    }
  }
  return magnitude;
}

/** Tick values at nice multiples covering [min, max]. */
export function niceTicks(min: number, max: number, target = 5): number[] {
  if (!(max > min)) {
    return [min];
  }
  const step = niceStep(max - min, target);
  const first = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let value = first; value <= max + step * 1e-9; value += step) {
    // snap away accumulated float error so labels stay clean
    ticks.push(Number(value.toFixed(10)));
  }
  return ticks;
}

export function formatTick(value: number): string {
  if (Number.isInteger(value)) {
    return String(value);
  }
  return String(Number(value.toFixed(2)));
}

/**
 * Path string for one series. Points are spaced evenly on x; gaps in
 * the data restart the path with a fresh move.
 */
export function linePath(
  ys: Array<number | null>,
  scaleX: (index: number) => number,
  scaleY: (value: number) => number,
): string {
  const parts: string[] = [];
  let pen = false;
  ys.forEach((value, index) => {
    if (value === null || !Number.isFinite(value)) {
      pen = false;
      return;
    }
    const command = pen ? "L" : "M";
    parts.push(`${command}${scaleX(index).toFixed(2)} ${scaleY(value).toFixed(2)}`);
    pen = true;
  });
  return parts.join("");
}

export function buildChart(spec: ChartSpec, width = 640, height = 280): ChartGeometry {
  const plot = {
    left: PAD.left,
    top: PAD.top,
    right: width - PAD.right,
    bottom: height - PAD.bottom,
  };
  const values = spec.series
    .flatMap((series) => series.y)
    .filter((value): value is number => value !== null && Number.isFinite(value));
  let lo = values.length ? Math.min(...values) : 0;
  let hi = values.length ? Math.max(...values) : 1;
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const count = Math.max(...spec.series.map((series) => series.y.length), 1);
  const spanX = Math.max(1, count - 1);
  const scaleX = (index: number) =>
    plot.left + ((plot.right - plot.left) * index) / spanX;
  const scaleY = (value: number) =>
    plot.bottom - ((plot.bottom - plot.top) * (value - lo)) / (hi - lo);

  const labels = spec.series[0] ? spec.series[0].x : [];
  const xTickCount = Math.min(6, labels.length);
  const xTicks: Array<{ x: number; label: string }> = [];
  for (let i = 0; i < xTickCount; i++) {
    const index =
      xTickCount === 1 ? 0 : Math.round((i * (labels.length - 1)) / (xTickCount - 1));
    xTicks.push({ x: scaleX(index), label: labels[index] ?? "" });
  }

  return {
    width,
    height,
    plot,
    paths: spec.series.map((series) => ({
      label: series.label,
      d: linePath(series.y, scaleX, scaleY),
    })),
    yTicks: niceTicks(lo, hi).map((value) => ({
      y: scaleY(value),
      label: formatTick(value),
    })),
    xTicks,
  };
}
