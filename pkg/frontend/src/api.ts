/**
 * Thin typed client for the /api/v1 backend plus a per-view request
 * channel: each view keeps at most one in-flight request, and responses
 * that arrive after a newer request was issued are discarded.
 */

import type {
  AttributeMatrixPayload,
  ExplainPayload,
  HeatmapPayload,
  MapPayload,
  RunSummary,
  ScatterPayload,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type Fetch = typeof fetch;

export class Client {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: Fetch = fetch,
  ) {}

  private async get<T>(path: string, params?: URLSearchParams): Promise<T> {
    const query = params && params.size ? `?${params}` : "";
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/v1/${path}${query}`,
    );
    return this.unwrap<T>(response);
  }

  private async unwrap<T>(response: Response): Promise<T> {
    const body = await response.json();
    if (!response.ok) {
      const detail = body?.detail ?? {};
      throw new ApiError(
        response.status,
        detail.code ?? "Unknown",
        detail.message ?? response.statusText,
      );
    }
    return body as T;
  }

  run(runId: string): Promise<RunSummary> {
    return this.get(`runs/${runId}`);
  }

  attributeMatrix(
    runId: string,
    params: URLSearchParams,
  ): Promise<AttributeMatrixPayload> {
    return this.get(`runs/${runId}/attribute-matrix`, params);
  }

  heatmap(runId: string, params: URLSearchParams): Promise<HeatmapPayload> {
    return this.get(`runs/${runId}/heatmap`, params);
  }

  map(runId: string, params: URLSearchParams): Promise<MapPayload> {
    return this.get(`runs/${runId}/map`, params);
  }

  scatter(runId: string, params: URLSearchParams): Promise<ScatterPayload> {
    return this.get(`runs/${runId}/scatter`, params);
  }

  async explain(
    runId: string,
    ruleKey: string,
    places?: string[],
  ): Promise<ExplainPayload> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/v1/runs/${runId}/explain`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ ruleKey, places: places ?? null }),
      },
    );
    return this.unwrap(response);
  }
}

/**
 * Serializes requests for one view: a response is delivered only if no
 * newer request was issued while it was in flight.
 */
export class ViewChannel<T> {
  private token = 0;

  async issue(request: () => Promise<T>): Promise<T | null> {
    const mine = ++this.token;
    const result = await request();
    return mine === this.token ? result : null;
  }
}
