// Wire types mirroring the annotation service JSON. Field names are
// snake_case because they cross the HTTP boundary as-is.

export interface OutputRef {
  example_id: string;
  model_id: string;
}

export interface Batch {
  id: string;
  items: OutputRef[];
  kind: "primary" | "overlap";
  annotator_id: string | null;
  completed: boolean;
}

export interface Progress {
  done: number;
  total: number;
  completed: boolean;
}

export interface BatchAssignment {
  batch: Batch;
  progress: Progress;
}

export interface Category {
  code: number;
  name: string;
}

export interface ChartSeries {
  label: string;
  x: string[];
  y: (number | null)[];
}

export interface ChartSpec {
  kind: "chart";
  title: string;
  unit: string;
  x_label: string;
  series: ChartSeries[];
}

export interface TableSpec {
  kind: "table";
  title: string;
  rows: [string, string][];
}

export interface KeyValueSpec {
  kind: "key_value";
  title: string;
  pairs: [string, string][];
}

export type VisualizationSpec = ChartSpec | TableSpec | KeyValueSpec;

export interface ExampleView {
  example_id: string;
  model_id: string;
  domain: string;
  output_type: string;
  data: string;
  visualization: VisualizationSpec;
  output_text: string;
  categories: Category[];
}

export interface Span {
  start: number;
  end: number;
  category: number;
}

export interface AnnotationPayload {
  example_id: string;
  model_id: string;
  annotator_id: string;
  spans: Span[];
}

export interface SubmitResponse {
  stored: boolean;
  progress: Progress;
}

export interface FinalizeResponse {
  finalized: boolean;
  progress: Progress;
}
