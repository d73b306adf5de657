/** Typed client for the /v1 HTTP API. Response shapes mirror the service
 * JSON exactly; nothing here derives graph facts on its own. */

export type QueryMode = "diagnostic_qa" | "ingredient_lookup";

export interface EntityRef {
  id: string;
  name: string;
  category: string;
}

export interface Citation {
  book: string;
  chapter: string;
  chunk_index: number;
  chunk_id: string;
}

export interface EvidenceLine {
  text: string;
  score: number;
  triple_id: string;
  subject: EntityRef;
  relation: string;
  object: EntityRef;
  citation: Citation;
}

export interface AnswerPayload {
  question: string;
  mode: QueryMode;
  text: string;
  degraded: boolean;
  citations: Citation[];
  context: EvidenceLine[];
}

export interface GraphEdge {
  id: string;
  subject: string;
  relation: string;
  object: string;
  provenance: string[];
}

export interface NeighborhoodResponse {
  seed: string;
  entities: EntityRef[];
  triples: GraphEdge[];
}

export interface HealthResponse {
  status: string;
  stats: Record<string, unknown>;
}

/** The six relations produced by extraction. Explorer expansions filter to
 * these so the canvas shows clinical structure, not shelving edges. */
export const CONTENT_RELATIONS = [
  "Treatment Plan",
  "Treat Disease",
  "Describe Disease",
  "Treatment Symptom",
  "Symptoms Present",
  "Ingredient Use",
] as const;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function readDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (body.detail !== undefined) return JSON.stringify(body.detail);
  } catch {
    // non-JSON error body; fall through to the status text
  }
  return response.statusText || "request failed";
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, err instanceof Error ? err.message : "network error");
    }
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  health(): Promise<HealthResponse> {
    return this.request("/v1/health");
  }

  qa(question: string, mode: QueryMode = "diagnostic_qa"): Promise<AnswerPayload> {
    return this.post("/v1/qa", { question, mode });
  }

  searchIngredient(query: string): Promise<AnswerPayload> {
    return this.post("/v1/search/ingredient", { query });
  }

  neighborhood(
    entity: string,
    options: { depth?: number; relations?: readonly string[]; direction?: "out" | "in" | "both" } = {},
  ): Promise<NeighborhoodResponse> {
    const params = new URLSearchParams({ entity });
    if (options.depth !== undefined) params.set("depth", String(options.depth));
    if (options.relations && options.relations.length > 0) {
      params.set("relations", options.relations.join(","));
    }
    if (options.direction) params.set("direction", options.direction);
    return this.request(`/v1/graph/neighborhood?${params.toString()}`);
  }
}
