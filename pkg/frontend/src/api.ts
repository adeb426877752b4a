/** Typed client for the suggestion service JSON API. */

export interface ParamBounds {
  min: number;
  max: number;
}

export interface HealthPayload {
  status: string;
  kernel_backend: string;
  vocab_size: number;
  model: { order: number; vocab_size: number };
  param_bounds: Record<string, ParamBounds>;
  text_word_bounds: { min: number; max: number };
}

export interface Candidate {
  title: string;
  score: number;
  matched_keywords: string[];
}

export interface Keyword {
  surface: string;
  rank: number;
  score: number;
  search_volume: number | null;
}

export interface GenerateResponse {
  candidates: Candidate[];
  keywords: Keyword[];
  params: Record<string, number | string | boolean>;
}

export interface GenerateRequest {
  text: string;
  r?: number;
  alpha?: number;
  beta?: number;
  beam_size?: number;
  n_best?: number;
  use_keywords?: boolean;
  pinned?: string[];
  excluded?: string[];
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorFrom(resp: Response): Promise<ApiError> {
  let detail = `${resp.status} ${resp.statusText}`.trim();
  try {
    const body: unknown = await resp.json();
    if (body && typeof body === "object" && "detail" in body) {
      const d = (body as { detail: unknown }).detail;
      detail = typeof d === "string" ? d : JSON.stringify(d);
    }
  } catch {
    // keep the status line
  }
  return new ApiError(detail, resp.status);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path;
  }

  async health(signal?: AbortSignal): Promise<HealthPayload> {
    const resp = await this.fetchFn(this.url("/health"), { signal });
    if (!resp.ok) throw await errorFrom(resp);
    return (await resp.json()) as HealthPayload;
  }

  async generate(
    req: GenerateRequest,
    signal?: AbortSignal,
  ): Promise<GenerateResponse> {
    const resp = await this.fetchFn(this.url("/generate"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
      signal,
    });
    if (!resp.ok) throw await errorFrom(resp);
    return (await resp.json()) as GenerateResponse;
  }
}
