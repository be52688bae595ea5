// Thin typed client for the trainer service. All calls are client-initiated;
// when the service is unreachable the session keeps playing locally and
// queued mistakes are flushed (with their already-known outcomes) once the
// service answers again.

export interface CatalogEntry {
  id: number;
  label: string;
  message: string;
}

export interface CreateSessionResponse {
  session_id: string;
  catalog: CatalogEntry[];
}

export interface DispatchResponse {
  reinforcer_id: number | null;
  message: string | null;
}

export interface OutcomeResponse {
  weights: number[] | null;
  entropy: number | null;
  regret: number | null;
}

export interface MetricsResponse {
  interaction_count: number;
  weights: number[] | null;
  entropy_series: number[];
  total_regret: number;
  preferred_reinforcer: number | null;
}

export class ServiceUnreachableError extends Error {}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new ServiceUnreachableError(`cannot reach trainer service: ${err}`);
  }
  if (!resp.ok) {
    const detail = await resp.text().catch(() => "");
    throw new Error(`${init?.method ?? "GET"} ${url} -> ${resp.status}: ${detail}`);
  }
  return (await resp.json()) as T;
}

function post<T>(url: string, body: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export class TrainerClient {
  constructor(readonly baseUrl: string) {}

  createSession(
    group: string,
    catalog: string,
    seed?: number
  ): Promise<CreateSessionResponse> {
    const body: Record<string, unknown> = { group, catalog };
    if (seed !== undefined) body.seed = seed;
    return post(`${this.baseUrl}/sessions`, body);
  }

  reportMistake(sessionId: string, stateTag: string): Promise<DispatchResponse> {
    return post(`${this.baseUrl}/sessions/${sessionId}/mistake`, { state_tag: stateTag });
  }

  reportOutcome(
    sessionId: string,
    reinforcerId: number,
    rectified: boolean
  ): Promise<OutcomeResponse> {
    return post(`${this.baseUrl}/sessions/${sessionId}/outcome`, {
      reinforcer_id: reinforcerId,
      rectified,
    });
  }

  getMetrics(sessionId: string): Promise<MetricsResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/metrics`);
  }
}
