// HTTP client for the activitykg service.
//
// Each logical view keeps at most one request in flight: submitting a new
// query aborts the previous one (latest-wins), and every response carries
// the raw body text so views can render numbers verbatim.

import type { ApiError } from "./types.js";

export interface ApiResponse<T> {
  payload: T;
  raw: string;
}

export class ServiceError extends Error {
  readonly detail: ApiError;

  constructor(detail: ApiError) {
    super(`${detail.code}: ${detail.message}`);
    this.detail = detail;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private controllers = new Map<string, AbortController>();

  constructor(
    private baseUrl: string,
    private apiKey: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  configure(baseUrl: string, apiKey: string): void {
    this.baseUrl = baseUrl;
    this.apiKey = apiKey;
  }

  /** Abort the previous request for `channel` and own the slot. */
  private signalFor(channel: string): AbortSignal {
    this.controllers.get(channel)?.abort();
    const controller = new AbortController();
    this.controllers.set(channel, controller);
    return controller.signal;
  }

  private headers(json: boolean): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["Content-Type"] = "application/json";
    if (this.apiKey) headers["X-API-Key"] = this.apiKey;
    return headers;
  }

  private async request<T>(channel: string, path: string, init: RequestInit): Promise<ApiResponse<T>> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      ...init,
      signal: this.signalFor(channel),
    });
    const raw = await response.text();
    let parsed: unknown;
    try {
      parsed = JSON.parse(raw);
    } catch {
      throw new ServiceError({ code: "BadResponse", message: raw.slice(0, 200), stage: "transport" });
    }
    if (!response.ok) {
      const detail = parsed as Partial<ApiError>;
      throw new ServiceError({
        code: detail.code ?? `HTTP${response.status}`,
        message: detail.message ?? "request failed",
        stage: detail.stage ?? "transport",
      });
    }
    return { payload: parsed as T, raw };
  }

  queryExperts<T>(text: string, topN: number, asOf?: string): Promise<ApiResponse<T>> {
    const body: Record<string, unknown> = { text, top_n: topN };
    if (asOf) body["as_of"] = asOf;
    return this.request<T>("experts", "/v1/query/experts", {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
  }

  taskPriorities<T>(user: string, horizon: number, asOf?: string): Promise<ApiResponse<T>> {
    const params = new URLSearchParams({ user, horizon: String(horizon) });
    if (asOf) params.set("as_of", asOf);
    return this.request<T>("tasks", `/v1/tasks/priorities?${params.toString()}`, {
      method: "GET",
      headers: this.headers(false),
    });
  }

  analytics<T>(text: string, asOf?: string): Promise<ApiResponse<T>> {
    const body: Record<string, unknown> = { text };
    if (asOf) body["as_of"] = asOf;
    return this.request<T>("analytics", "/v1/analytics/query", {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
  }

  neighborhood<T>(entityId: string, hops: number): Promise<ApiResponse<T>> {
    const capped = Math.min(Math.max(hops, 1), 2);
    return this.request<T>("graph", `/v1/graph/neighborhood/${entityId}?hops=${capped}`, {
      method: "GET",
      headers: this.headers(false),
    });
  }

  health<T>(): Promise<ApiResponse<T>> {
    return this.request<T>("health", "/v1/healthz", { method: "GET", headers: this.headers(false) });
  }
}
