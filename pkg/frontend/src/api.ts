/**
 * Typed client for the gateway API.
 *
 * The fetch implementation is injected so tests can count and stub calls.
 * The only mutating requests this client can issue are the two suggestion
 * decisions, the policy replacement, and the record write — mirroring the
 * API's mutation surface one to one.
 */

import type {
  ChainInfo,
  MetricVectorPayload,
  PolicyDocument,
  Ranking,
  Suggestion,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getChains(): Promise<ChainInfo[]> {
    return this.request("/v1/chains");
  }

  getMetrics(): Promise<Record<string, MetricVectorPayload>> {
    return this.request("/v1/metrics");
  }

  getRanking(): Promise<Ranking> {
    return this.request("/v1/ranking");
  }

  getSuggestions(state?: string): Promise<Suggestion[]> {
    const query = state ? `?state=${encodeURIComponent(state)}` : "";
    return this.request(`/v1/suggestions${query}`);
  }

  approveSuggestion(id: string): Promise<Suggestion> {
    return this.request(`/v1/suggestions/${encodeURIComponent(id)}/approve`, {
      method: "POST",
    });
  }

  rejectSuggestion(id: string): Promise<Suggestion> {
    return this.request(`/v1/suggestions/${encodeURIComponent(id)}/reject`, {
      method: "POST",
    });
  }

  getPolicy(): Promise<PolicyDocument> {
    return this.request("/v1/policy");
  }

  putPolicy(doc: PolicyDocument): Promise<PolicyDocument> {
    return this.request("/v1/policy", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
  }
}
