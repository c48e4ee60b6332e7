// DOM adapter: everything here takes computed state in and mutates the
// page; no annotation logic lives on this side.

import { buildChart } from "./chart.js";
import { segments } from "./spans.js";
import type { ChartSpec, KeyValueSpec, Span, TableSpec, VisualizationSpec } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const SERIES_COLORS = ["#2477b3", "#d95f02", "#1b9e77", "#7570b3"];

export function el(
  tag: string,
  className = "",
  text = "",
): HTMLElement {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

export function clear(host: HTMLElement): void {
  while (host.firstChild) {
    host.removeChild(host.firstChild);
  }
}

/** Character offset of a (node, offset) selection endpoint within host. */
function offsetWithin(host: HTMLElement, node: Node, offset: number): number {
  const range = document.createRange();
  range.selectNodeContents(host);
  range.setEnd(node, offset);
  return range.toString().length;
}

export interface TextHandlers {
  onSelect: (start: number, end: number) => void;
  onSpanClick: (spanIndex: number) => void;
}

export function renderAnnotatedText(
  host: HTMLElement,
  text: string,
  spans: Span[],
  handlers: TextHandlers,
): void {
  clear(host);
  for (const segment of segments(text, spans)) {
    const piece = el("span", segment.span ? `hl cat-${segment.span.category}` : "");
    piece.textContent = text.slice(segment.start, segment.end);
    if (segment.span) {
      const index = spans.indexOf(segment.span);
      piece.addEventListener("click", (event) => {
        const selection = window.getSelection();
        if (selection && !selection.isCollapsed) {
          return; // a drag ended here, not a click
        }
        event.stopPropagation();
        handlers.onSpanClick(index);
      });
    }
    host.appendChild(piece);
  }
  host.onmouseup = () => {
    const selection = window.getSelection();
    if (!selection || selection.isCollapsed || selection.rangeCount === 0) {
      return;
    }
    const range = selection.getRangeAt(0);
    if (!host.contains(range.startContainer) || !host.contains(range.endContainer)) {
      return;
    }
    const start = offsetWithin(host, range.startContainer, range.startOffset);
    const end = offsetWithin(host, range.endContainer, range.endOffset);
    selection.removeAllRanges();
    handlers.onSelect(start, end);
  };
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function renderChart(host: HTMLElement, spec: ChartSpec): void {
  const geometry = buildChart(spec);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${geometry.width} ${geometry.height}`,
    class: "chart",
  });
  const { plot } = geometry;
  for (const tick of geometry.yTicks) {
    svg.appendChild(
      svgEl("line", {
        x1: String(plot.left),
        x2: String(plot.right),
        y1: tick.y.toFixed(2),
        y2: tick.y.toFixed(2),
        class: "gridline",
      }),
    );
    const label = svgEl("text", {
      x: String(plot.left - 6),
      y: tick.y.toFixed(2),
      class: "tick tick-y",
    });
    label.textContent = tick.label;
    svg.appendChild(label);
  }
  for (const tick of geometry.xTicks) {
    const label = svgEl("text", {
      x: tick.x.toFixed(2),
      y: String(geometry.height - 8),
      class: "tick tick-x",
    });
    label.textContent = tick.label;
    svg.appendChild(label);
  }
  geometry.paths.forEach((path, index) => {
    if (path.d) {
      svg.appendChild(
        svgEl("path", {
          d: path.d,
          fill: "none",
          stroke: SERIES_COLORS[index % SERIES_COLORS.length],
          "stroke-width": "1.5",
        }),
      );
    }
  });
  host.appendChild(svg);
  if (spec.series.length > 1) {
    const legend = el("div", "legend");
    spec.series.forEach((series, index) => {
      const entry = el("span", "legend-entry", series.label);
      entry.style.borderLeftColor = SERIES_COLORS[index % SERIES_COLORS.length];
      legend.appendChild(entry);
    });
    host.appendChild(legend);
  }
  if (spec.unit) {
    host.appendChild(el("div", "chart-unit", `unit: ${spec.unit}`));
  }
}

function renderPairs(host: HTMLElement, rows: [string, string][]): void {
  const table = el("table", "kv");
  for (const [key, value] of rows) {
    const row = el("tr");
    row.appendChild(el("td", "kv-key", key));
    row.appendChild(el("td", "kv-value", value));
    table.appendChild(row);
  }
  host.appendChild(table);
}

export function renderVisualization(host: HTMLElement, spec: VisualizationSpec): void {
  clear(host);
  if (spec.title) {
    host.appendChild(el("h3", "viz-title", spec.title));
  }
  if (spec.kind === "chart") {
    renderChart(host, spec);
  } else if (spec.kind === "table") {
    renderPairs(host, (spec as TableSpec).rows);
  } else {
    renderPairs(host, (spec as KeyValueSpec).pairs);
  }
}
