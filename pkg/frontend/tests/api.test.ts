import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function scripted(...responses: Response[]): { calls: Call[]; client: ApiClient } {
  const calls: Call[] = [];
  const client = new ApiClient("", async (url, init) => {
    calls.push({ url, init });
    const next = responses.shift();
    if (!next) {
      throw new Error("unexpected request");
    }
    return next;
  });
  return { calls, client };
}

describe("ApiClient", () => {
  it("assigns a batch with an encoded annotator", async () => {
    const assignment = {
      batch: { id: "c-b0000", items: [], kind: "primary", annotator_id: "a b", completed: false },
      progress: { done: 0, total: 5, completed: false },
    };
    const { calls, client } = scripted(jsonResponse(assignment));
    const result = await client.assignBatch("study", "a b");
    expect(calls[0].url).toBe("/campaign/study/batch?annotator=a+b");
    expect(result.batch.id).toBe("c-b0000");
  });

  it("fetches an example by ref", async () => {
    const { calls, client } = scripted(jsonResponse({ example_id: "x" }));
    await client.fetchExample({ example_id: "owid-dev-0001", model_id: "m/1" });
    expect(calls[0].url).toBe("/example/owid-dev-0001?model=m%2F1");
  });

  it("posts annotations as JSON", async () => {
    const { calls, client } = scripted(
      jsonResponse({ stored: true, progress: { done: 1, total: 5, completed: false } }),
    );
    const response = await client.submit("c-b0000", {
      example_id: "e",
      model_id: "m",
      annotator_id: "alice",
      spans: [{ start: 0, end: 4, category: 0 }],
    });
    expect(response.progress.done).toBe(1);
    expect(calls[0].url).toBe("/annotation");
    expect(calls[0].init?.method).toBe("POST");
    const body = JSON.parse(String(calls[0].init?.body));
    expect(body.batch_id).toBe("c-b0000");
    expect(body.annotation.spans).toEqual([{ start: 0, end: 4, category: 0 }]);
  });

  it("finalizes with a POST", async () => {
    const { calls, client } = scripted(
      jsonResponse({ finalized: true, progress: { done: 5, total: 5, completed: true } }),
    );
    await client.finalize("study", "c-b0000", "alice");
    expect(calls[0].url).toBe("/campaign/study/batch/c-b0000/finalize?annotator=alice");
    expect(calls[0].init?.method).toBe("POST");
  });

  it("surfaces service detail messages as ApiError", async () => {
    const { client } = scripted(jsonResponse({ detail: "no unseen batch left" }, 409));
    const error = await client.assignBatch("study", "alice").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(409);
    expect(error.message).toBe("no unseen batch left");
  });

  it("falls back to the status line for non-JSON errors", async () => {
    const { client } = scripted(new Response("boom", { status: 502 }));
    const error = await client.assignBatch("study", "alice").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.message).toBe("HTTP 502");
  });

  it("prefixes an explicit base url", () => {
    const client = new ApiClient("http://127.0.0.1:8000");
    expect(client.exportUrl("study")).toBe("http://127.0.0.1:8000/campaign/study/export");
  });
});
