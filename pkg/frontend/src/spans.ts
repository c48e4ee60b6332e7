// Span editing rules, kept free of DOM concerns so they can be tested
// directly. Spans live on character offsets of the output text and are
// held sorted and non-overlapping: a new selection wins over whatever it
// covers, and touching spans of the same category fuse into one.

import type { Span } from "./types.js";

export const CATEGORY_COUNT = 4;

export interface Segment {
  start: number;
  end: number;
  span: Span | null;
}

/** [start, end) offsets of every whitespace-delimited word. */
export function wordBounds(text: string): Array<[number, number]> {
  const bounds: Array<[number, number]> = [];
  const words = /\S+/g;
  let match: RegExpExecArray | null;
  while ((match = words.exec(text)) !== null) {
    bounds.push([match.index, match.index + match[0].length]);
  }
  return bounds;
}

/**
 * Expand a raw selection to whole words: the result covers every word
 * the selection touches. Returns null for empty or whitespace-only
 * selections.
 */
export function snapToWords(
  text: string,
  start: number,
  end: number,
): [number, number] | null {
  if (start > end) {
    [start, end] = [end, start];
  }
  start = Math.max(0, Math.min(start, text.length));
  end = Math.max(0, Math.min(end, text.length));
  if (start === end) {
    return null;
  }
  let lo = -1;
  let hi = -1;
  for (const [wordStart, wordEnd] of wordBounds(text)) {
    if (wordStart < end && wordEnd > start) {
      if (lo < 0) {
        lo = wordStart;
      }
      hi = wordEnd;
    }
  }
  return lo < 0 ? null : [lo, hi];
}

function mergeTouching(sorted: Span[]): Span[] {
  const out: Span[] = [];
  for (const span of sorted) {
    const last = out[out.length - 1];
    if (last && last.category === span.category && span.start <= last.end) {
      last.end = Math.max(last.end, span.end);
    } else {
      out.push({ ...span });
    }
  }
  return out;
}

/**
 * Insert a span, carving it out of anything it overlaps. Same-category
 * neighbours that touch the result merge with it, so repeated marking
 * of adjacent words grows one span instead of stacking fragments.
 */
export function applySpan(spans: Span[], added: Span): Span[] {
  if (added.start >= added.end) {
    return spans.slice();
  }
  const out: Span[] = [];
  for (const span of spans) {
    if (span.end <= added.start || span.start >= added.end) {
      out.push({ ...span });
      continue;
    }
    if (span.start < added.start) {
      out.push({ start: span.start, end: added.start, category: span.category });
    }
    if (span.end > added.end) {
      out.push({ start: added.end, end: span.end, category: span.category });
    }
  }
  out.push({ ...added });
  out.sort((a, b) => a.start - b.start);
  return mergeTouching(out);
}

/**
 * Advance a span to the next category; past the last one the span is
 * removed, so clicking walks the full taxonomy and then clears.
 */
export function cycleCategory(spans: Span[], index: number): Span[] {
  const out = spans.map((span) => ({ ...span }));
  const span = out[index];
  if (!span) {
    return out;
  }
  if (span.category + 1 >= CATEGORY_COUNT) {
    out.splice(index, 1);
  } else {
    span.category += 1;
  }
  return out;
}

export function removeSpan(spans: Span[], index: number): Span[] {
  const out = spans.map((span) => ({ ...span }));
  out.splice(index, 1);
  return out;
}

/** Index of the span covering a position, or -1. */
export function spanAt(spans: Span[], position: number): number {
  return spans.findIndex((span) => span.start <= position && position < span.end);
}

/** Cut the text into plain and annotated pieces covering it completely. */
export function segments(text: string, spans: Span[]): Segment[] {
  const out: Segment[] = [];
  let cursor = 0;
  for (const span of spans) {
    if (span.start > cursor) {
      out.push({ start: cursor, end: span.start, span: null });
    }
    out.push({ start: span.start, end: span.end, span });
    cursor = span.end;
  }
  if (cursor < text.length) {
    out.push({ start: cursor, end: text.length, span: null });
  }
  return out;
}

/** Sorted copies with only the wire fields, ready for submission. */
export function normalized(spans: Span[]): Span[] {
  return spans
    .map(({ start, end, category }) => ({ start, end, category }))
    .sort((a, b) => a.start - b.start || a.end - b.end);
}
