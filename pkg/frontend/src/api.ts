/** Thin protocol client.
 *
 * The transport is injected so tests can substitute a scripted in-memory
 * server; the browser entry point wraps `fetch`.  Every response body —
 * success or error — is scanned for ground-truth keys before it is handed
 * to the rest of the client: the server must never tell us whether an
 * unresolved item is legitimate, and we assert that absence here.
 */

import type {
  CreateResponse,
  Questionnaires,
  SessionResponse,
  StateResponse,
} from "./types";

export interface HttpResponse {
  status: number;
  body: unknown;
}

export type Transport = (
  method: string,
  path: string,
  body?: unknown,
) => Promise<HttpResponse>;

export function fetchTransport(baseUrl: string): Transport {
  return async (method, path, body) => {
    const resp = await fetch(baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return { status: resp.status, body: await resp.json() };
  };
}

/** Keys that would reveal an item's ground truth if they ever appeared. */
const TRUTH_KEYS = new Set(["legitimate", "tricks"]);

/** Paths (like `$.state.stage.balloon.legitimate`) of any truth keys. */
export function findTruthLeaks(value: unknown, path = "$"): string[] {
  const leaks: string[] = [];
  if (Array.isArray(value)) {
    value.forEach((v, i) => leaks.push(...findTruthLeaks(v, `${path}[${i}]`)));
  } else if (value !== null && typeof value === "object") {
    for (const [k, v] of Object.entries(value)) {
      const here = `${path}.${k}`;
      if (TRUTH_KEYS.has(k)) leaks.push(here);
      leaks.push(...findTruthLeaks(v, here));
    }
  }
  return leaks;
}

export class TruthLeakError extends Error {
  constructor(readonly leaks: string[]) {
    super(`server response leaks ground truth at: ${leaks.join(", ")}`);
  }
}

export class NetworkError extends Error {}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
    readonly seq?: number,
  ) {
    super(`${code}: ${detail}`);
  }
}

export class StaleSeqError extends ApiError {}

export class ApiClient {
  constructor(private readonly transport: Transport) {}

  private async call(method: string, path: string, body?: unknown): Promise<unknown> {
    let resp: HttpResponse;
    try {
      resp = await this.transport(method, path, body);
    } catch (err) {
      throw new NetworkError(String(err));
    }
    const leaks = findTruthLeaks(resp.body);
    if (leaks.length > 0) throw new TruthLeakError(leaks);
    if (resp.status >= 400) {
      const b = resp.body as Record<string, unknown> | null;
      const code = typeof b?.error === "string" ? b.error : "HttpError";
      const detail = typeof b?.detail === "string" ? b.detail : "";
      const seq = typeof b?.seq === "number" ? b.seq : undefined;
      const cls = code === "StaleSeq" ? StaleSeqError : ApiError;
      throw new cls(resp.status, code, detail, seq);
    }
    return resp.body;
  }

  async createSession(
    playerId: string,
    corpusRef: string,
    seed: number,
    actionId: string,
  ): Promise<CreateResponse> {
    return (await this.call("POST", "/api/sessions", {
      player_id: playerId,
      corpus_ref: corpusRef,
      seed,
      action_id: actionId,
    })) as CreateResponse;
  }

  async getState(sessionId: string): Promise<StateResponse> {
    return (await this.call("GET", `/api/sessions/${sessionId}/state`)) as StateResponse;
  }

  async postAction(
    sessionId: string,
    action: Record<string, unknown>,
  ): Promise<SessionResponse> {
    return (await this.call(
      "POST",
      `/api/sessions/${sessionId}/actions`,
      action,
    )) as SessionResponse;
  }

  async questionnaires(): Promise<Questionnaires> {
    return (await this.call("GET", "/api/questionnaires")) as Questionnaires;
  }

  async report(sessionId: string): Promise<Record<string, unknown>> {
    return (await this.call(
      "GET",
      `/api/sessions/${sessionId}/report`,
    )) as Record<string, unknown>;
  }
}
