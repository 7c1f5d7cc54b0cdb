// Thin fetch wrapper over the service API. Every mutation goes through these
// documented routes; nothing is computed client-side.

import type {
  GridlockEntry, GridlockResult, PatchResponse, RunDoc, TurnOutcome,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await resp.text();
    if (!resp.ok) {
      throw new ApiError(resp.status, text || `HTTP ${resp.status}`);
    }
    return (text ? JSON.parse(text) : null) as T;
  }

  private async requestText(path: string): Promise<string> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new ApiError(resp.status, `HTTP ${resp.status}`);
    return resp.text();
  }

  createSession(): Promise<{ session_id: string }> {
    return this.request("POST", "/api/sessions");
  }

  sendMessage(sessionId: string, text: string): Promise<TurnOutcome> {
    return this.request("POST", `/api/sessions/${sessionId}/messages`, { text });
  }

  getSessionTrace(sessionId: string): Promise<string> {
    return this.requestText(`/api/sessions/${sessionId}/trace`);
  }

  startRun(congress: number, noReview = false): Promise<{ run_id: string }> {
    return this.request("POST", "/api/runs", { congress, no_review: noReview });
  }

  getRun(runId: string): Promise<RunDoc> {
    return this.request("GET", `/api/runs/${runId}`);
  }

  getClusters(runId: string): Promise<import("./types.js").ClusterReport[]> {
    return this.request("GET", `/api/runs/${runId}/clusters`);
  }

  patchCluster(
    runId: string,
    clusterName: string,
    patch: { threshold?: number; bill_overrides?: Record<string, boolean> },
  ): Promise<PatchResponse> {
    return this.request(
      "PATCH",
      `/api/runs/${runId}/clusters/${encodeURIComponent(clusterName)}`,
      patch,
    );
  }

  finalizeRun(runId: string): Promise<GridlockResult> {
    return this.request("POST", `/api/runs/${runId}/finalize`);
  }

  getRunTrace(runId: string): Promise<string> {
    return this.requestText(`/api/runs/${runId}/trace`);
  }

  getGridlockSeries(from: number, to: number): Promise<GridlockEntry[]> {
    return this.request("GET", `/api/gridlock?from=${from}&to=${to}`);
  }
}

/** Poll a run every `intervalMs` (1 s in production) until it settles. */
export async function pollRun(
  api: ApiClient,
  runId: string,
  intervalMs = 1000,
  sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
  maxPolls = 600,
): Promise<RunDoc> {
  for (let i = 0; i < maxPolls; i++) {
    const run = await api.getRun(runId);
    if (["awaiting_review", "finalized", "failed"].includes(run.state)) {
      return run;
    }
    await sleep(intervalMs);
  }
  throw new Error(`run ${runId} did not settle after ${maxPolls} polls`);
}
