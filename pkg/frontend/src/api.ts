// Typed client for the labeling service JSON API. Every number shown in
// the UI comes from one of these responses; the client never recomputes
// model quantities.

export interface SessionStatus {
  session_id: string;
  state: 'idle' | 'retraining';
  iteration: number;
  model_version: number;
  label_counts: Record<string, number>;
  yield: Record<string, { shown: number; applied: number }>;
  agreement: number;
}

export interface CandidateCard {
  node: string;
  title: string;
  category: string;
  probabilities: Record<string, number>;
  stratum: string;
  provenance: string;
}

export interface CandidatesResponse {
  stratum: string;
  items: CandidateCard[];
  model_version: number;
}

export interface VerdictResponse {
  status: string;
  verdict_id: string;
  label_counts: Record<string, number>;
}

export interface CurvePoint {
  threshold: number;
  fraction: number;
}

export interface IterationCurve {
  iteration: number;
  curve: CurvePoint[];
}

export type Stratum = 'strong_conservative' | 'strong_liberal' | 'ambiguous';

export class StaleModelError extends Error {
  constructor(public modelVersion: number) {
    super('model version changed; refresh the queue');
  }
}

export class BusyError extends Error {}

async function parseError(response: Response): Promise<never> {
  let body: { error?: string; model_version?: number } = {};
  try {
    body = await response.json();
  } catch {
    // non-JSON error body; fall through to the generic error
  }
  if (response.status === 409 && body.error === 'stale_model') {
    throw new StaleModelError(body.model_version ?? -1);
  }
  if (response.status === 423) {
    throw new BusyError(`service busy: ${body.error ?? response.status}`);
  }
  throw new Error(`request failed: ${response.status} ${body.error ?? ''}`);
}

export class ApiClient {
  constructor(
    private base: string = '',
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  session(): Promise<SessionStatus> {
    return this.get('/api/session');
  }

  status(): Promise<SessionStatus> {
    return this.get('/api/status');
  }

  candidates(stratum: Stratum, limit = 20): Promise<CandidatesResponse> {
    return this.get(`/api/candidates?stratum=${stratum}&limit=${limit}`);
  }

  submitVerdict(
    node: string,
    cls: string,
    verdictId: string,
    modelVersion: number,
  ): Promise<VerdictResponse> {
    return this.post('/api/verdicts', {
      node,
      class: cls,
      verdict_id: verdictId,
      model_version: modelVersion,
    });
  }

  retrain(): Promise<{ status: string; iteration: number }> {
    return this.post('/api/retrain', {});
  }

  async curves(): Promise<IterationCurve[]> {
    const payload = await this.get<{ iterations: { iteration: number; curve: [number, number][] }[] }>(
      '/api/curves',
    );
    return payload.iterations.map((entry) => ({
      iteration: entry.iteration,
      curve: entry.curve.map(([threshold, fraction]) => ({ threshold, fraction })),
    }));
  }
}
