// Thin typed client over the annotation service. The fetch function is
// injectable so tests can script responses without a server.

import type {
  AnnotationPayload,
  BatchAssignment,
  ExampleView,
  FinalizeResponse,
  OutputRef,
  SubmitResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (typeof body.detail === "string") {
          detail = body.detail;
        }
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  assignBatch(campaign: string, annotator: string): Promise<BatchAssignment> {
    const query = new URLSearchParams({ annotator });
    return this.request(`/campaign/${encodeURIComponent(campaign)}/batch?${query}`);
  }

  fetchExample(ref: OutputRef): Promise<ExampleView> {
    const query = new URLSearchParams({ model: ref.model_id });
    return this.request(`/example/${encodeURIComponent(ref.example_id)}?${query}`);
  }

  submit(batchId: string, annotation: AnnotationPayload): Promise<SubmitResponse> {
    return this.request("/annotation", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ batch_id: batchId, annotation }),
    });
  }

  finalize(campaign: string, batchId: string, annotator: string): Promise<FinalizeResponse> {
    const query = new URLSearchParams({ annotator });
    return this.request(
      `/campaign/${encodeURIComponent(campaign)}/batch/${encodeURIComponent(batchId)}/finalize?${query}`,
      { method: "POST" },
    );
  }

  exportUrl(campaign: string): string {
    return `${this.base}/campaign/${encodeURIComponent(campaign)}/export`;
  }
}
