/** Thin typed client over the service wire API.
 *
 * Every call maps one-to-one onto a service endpoint; the client adds
 * no caching, no retries, and — deliberately — no computation. Error
 * bodies are surfaced as ApiError so callers can reach the field-level
 * details the service provides.
 */

import type {
  ApiErrorBody,
  CaseValues,
  CounterfactualResponse,
  ExplainResponse,
  ModelResponse,
  PredictResponse,
  SampleResponse,
  SchemaResponse,
  TargetDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.body = body;
  }

  /** Field errors as a map, for attaching to form controls. */
  fieldMessages(): Map<string, string> {
    const out = new Map<string, string>();
    for (const d of this.body.details) {
      if (!out.has(d.field)) out.set(d.field, d.message);
    }
    return out;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the client needs from the service; ApiClient is the wire
 * implementation, tests substitute stubs. */
export interface ServiceApi {
  getSchema(): Promise<SchemaResponse>;
  getModel(): Promise<ModelResponse>;
  predict(values: CaseValues): Promise<PredictResponse>;
  explain(values: CaseValues): Promise<ExplainResponse>;
  counterfactual(
    values: CaseValues,
    options?: { k?: number; target?: TargetDoc },
  ): Promise<CounterfactualResponse>;
  sampleCases(n?: number, seed?: number): Promise<SampleResponse>;
}

export class ApiClient implements ServiceApi {
  private readonly base: string;
  private readonly fetchFn: FetchLike;
  /** Identical requests issued while one is still in flight share its
   * promise instead of hitting the service twice. */
  private readonly inFlight = new Map<string, Promise<unknown>>();

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const payload = body === undefined ? undefined : JSON.stringify(body);
    const key = `${method} ${path} ${payload ?? ""}`;
    const pending = this.inFlight.get(key);
    if (pending) return pending as Promise<T>;
    const work = this.send<T>(method, path, payload).finally(() => {
      this.inFlight.delete(key);
    });
    this.inFlight.set(key, work);
    return work;
  }

  private async send<T>(method: string, path: string, payload?: string): Promise<T> {
    const init: RequestInit = { method, headers: { accept: "application/json" } };
    if (payload !== undefined) {
      init.headers = { ...init.headers, "content-type": "application/json" };
      init.body = payload;
    }
    const resp = await this.fetchFn(`${this.base}${path}`, init);
    if (!resp.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await resp.json()) as ApiErrorBody;
      } catch {
        parsed = { code: "http_error", message: `HTTP ${resp.status}`, details: [] };
      }
      throw new ApiError(resp.status, parsed);
    }
    return (await resp.json()) as T;
  }

  getSchema(): Promise<SchemaResponse> {
    return this.request("GET", "/api/schema");
  }

  getModel(): Promise<ModelResponse> {
    return this.request("GET", "/api/model");
  }

  predict(values: CaseValues): Promise<PredictResponse> {
    return this.request("POST", "/api/predict", { case: values });
  }

  explain(values: CaseValues): Promise<ExplainResponse> {
    return this.request("POST", "/api/explain", { case: values });
  }

  counterfactual(
    values: CaseValues,
    options: { k?: number; target?: TargetDoc } = {},
  ): Promise<CounterfactualResponse> {
    const body: Record<string, unknown> = { case: values };
    if (options.k !== undefined) body.k = options.k;
    if (options.target !== undefined) body.target = options.target;
    return this.request("POST", "/api/counterfactual", body);
  }

  sampleCases(n = 1, seed = 0): Promise<SampleResponse> {
    return this.request("POST", "/api/cases/sample", { n, seed });
  }
}
