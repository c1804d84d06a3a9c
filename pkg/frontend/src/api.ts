import type {
  CreatedSession,
  NetworkDoc,
  ObservationResult,
  Recommendation,
  SessionConfig,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

/**
 * Thin typed client over the session endpoints.  The console never computes
 * anything itself; every number it shows came out of one of these calls.
 */
export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: { method: string; headers?: Record<string, string>; body?: string } = {
      method,
    };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.base + path, init);
    const payload = (await resp.json()) as Record<string, unknown>;
    if (resp.status >= 400) {
      throw new ApiError(resp.status, String(payload["detail"] ?? "request failed"));
    }
    return payload as T;
  }

  createSession(network: NetworkDoc, config: SessionConfig): Promise<CreatedSession> {
    return this.request("POST", "/sessions", { network, config });
  }

  getState(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}`);
  }

  getRecommendation(id: string): Promise<Recommendation> {
    return this.request("GET", `/sessions/${id}/recommendation`);
  }

  submitObservation(
    id: string,
    edges: Record<string, number>,
    attended: number[],
  ): Promise<ObservationResult> {
    return this.request("POST", `/sessions/${id}/observation`, { edges, attended });
  }

  exportSession(id: string): Promise<unknown> {
    return this.request("GET", `/sessions/${id}/export`);
  }
}
