/** Thin fetch client for the decision service. Every number the console
 * displays comes from these payloads; the console does no modeling. */

import type {
  CostOverrides, ErrorBody, GridOverrides, PredictResponse, RecommendResponse,
  RockState, SurfacePayload,
} from "./types.js";

/** 4xx with a structured body: field-level validation or infeasibility. */
export class ServiceValidationError extends Error {
  constructor(public status: number, public body: ErrorBody) {
    super(`service rejected the request (${status}): ${body.code}`);
  }
}

/** Network failure or 5xx: the console shows a retry banner. */
export class ServiceUnavailableError extends Error {}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.base}/api/v1/${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        signal,
      });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ServiceUnavailableError(`cannot reach the service: ${err}`);
    }
    if (resp.status >= 500) {
      throw new ServiceUnavailableError(`service error ${resp.status}`);
    }
    if (!resp.ok) {
      throw new ServiceValidationError(resp.status, (await resp.json()) as ErrorBody);
    }
    return (await resp.json()) as T;
  }

  async health(): Promise<{ status: string; models: string[] }> {
    const resp = await this.fetchImpl(`${this.base}/api/v1/health`);
    return (await resp.json()) as { status: string; models: string[] };
  }

  predict(rock: RockState, th: number, tor: number, cost?: CostOverrides,
          signal?: AbortSignal): Promise<PredictResponse> {
    return this.post("predict", { rock, th, tor, cost: cost ?? null }, signal);
  }

  recommend(rock: RockState, cost?: CostOverrides, grid?: GridOverrides,
            baseline?: { th: number; tor: number } | null,
            signal?: AbortSignal): Promise<RecommendResponse> {
    return this.post("recommend",
      { rock, cost: cost ?? null, grid: grid ?? null, baseline: baseline ?? null },
      signal);
  }

  surface(rock: RockState, cost?: CostOverrides, grid?: GridOverrides,
          signal?: AbortSignal): Promise<SurfacePayload> {
    return this.post("surface", { rock, cost: cost ?? null, grid: grid ?? null }, signal);
  }
}
