// Thin typed client for the realign service. All requests are read-only
// solves; the client never mutates league data server-side.

import type {
  ApiErrorBody,
  DiffResponse,
  EditSpec,
  LeagueDetail,
  LeagueSummary,
  NestedStructure,
  PredicateSpec,
  SolveResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

export class PendingError extends Error {
  constructor(public retryAfterSeconds: number) {
    super("solve pending; retry");
  }
}

export interface SolveRequestBody {
  dataset: string;
  template?: string;
  predicates: PredicateSpec[];
  edits: EditSpec[];
  top_k: number;
  page: number;
  page_size: number;
  include_geojson: boolean;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (response.status === 202) {
      const body = (await response.json()) as ApiErrorBody;
      const details = (body.details ?? {}) as { retry_after_seconds?: number };
      throw new PendingError(details.retry_after_seconds ?? 2);
    }
    if (!response.ok) {
      const body = (await response.json().catch(() => ({
        code: "unknown",
        message: response.statusText,
      }))) as ApiErrorBody;
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  leagues(): Promise<LeagueSummary[]> {
    return this.request<LeagueSummary[]>("/leagues");
  }

  league(id: string): Promise<LeagueDetail> {
    return this.request<LeagueDetail>(`/leagues/${id}`);
  }

  async solve(body: SolveRequestBody, maxRetries = 30): Promise<SolveResponse> {
    for (let attempt = 0; ; attempt++) {
      try {
        return await this.request<SolveResponse>("/solve", {
          method: "POST",
          body: JSON.stringify(body),
        });
      } catch (error) {
        if (error instanceof PendingError && attempt < maxRetries) {
          await sleep(error.retryAfterSeconds * 1000);
          continue;
        }
        throw error;
      }
    }
  }

  diff(
    dataset: string,
    a: NestedStructure | "current",
    b: NestedStructure | "current",
    template?: string,
  ): Promise<DiffResponse> {
    return this.request<DiffResponse>("/diff", {
      method: "POST",
      body: JSON.stringify({ dataset, a, b, template }),
    });
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
