// Session state for one assigned batch: which outputs are annotated,
// which edits still need saving, and when finalize may be offered.

import { normalized } from "./spans.js";
import type { AnnotationPayload, Batch, OutputRef, Span } from "./types.js";

export interface ItemState {
  ref: OutputRef;
  spans: Span[];
  /** an annotation for this output has reached the server */
  saved: boolean;
  /** edited since the last save */
  dirty: boolean;
}

export class BatchSession {
  readonly batchId: string;
  readonly annotator: string;
  readonly items: ItemState[];
  private index = 0;

  constructor(batch: Batch, annotator: string) {
    this.batchId = batch.id;
    this.annotator = annotator;
    this.items = batch.items.map((ref) => ({
      ref,
      spans: [],
      saved: false,
      dirty: false,
    }));
  }

  get position(): number {
    return this.index;
  }

  get current(): ItemState {
    return this.items[this.index];
  }

  goTo(index: number): void {
    this.index = Math.max(0, Math.min(index, this.items.length - 1));
  }

  next(): void {
    this.goTo(this.index + 1);
  }

  prev(): void {
    this.goTo(this.index - 1);
  }

  setSpans(index: number, spans: Span[]): void {
    const item = this.items[index];
    item.spans = normalized(spans);
    item.dirty = true;
  }

  markSaved(index: number): void {
    const item = this.items[index];
    item.saved = true;
    item.dirty = false;
  }

  payload(index: number): AnnotationPayload {
    const item = this.items[index];
    return {
      example_id: item.ref.example_id,
      model_id: item.ref.model_id,
      annotator_id: this.annotator,
      spans: normalized(item.spans),
    };
  }

  get savedCount(): number {
    return this.items.filter((item) => item.saved && !item.dirty).length;
  }

  /** Every output saved and no unsaved edits anywhere. */
  get canFinalize(): boolean {
    return this.items.every((item) => item.saved && !item.dirty);
  }

  /** First output still needing attention, or -1 when none does. */
  get pendingIndex(): number {
    return this.items.findIndex((item) => !item.saved || item.dirty);
  }
}
