import type { ProtocolSummary, SessionView, TracePage } from './types';

/** Name of the pseudo-leaf that answers an `advance` pending. */
export const ADVANCE = '__advance__';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

/**
 * Thin typed client for the protocol service. Every mutation returns the
 * server's full session view; callers render from that, never from a local
 * guess about what the server will do.
 */
export class Api {
  constructor(readonly base: string = '') {}

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  async listProtocols(): Promise<ProtocolSummary[]> {
    const body = await asJson<{ protocols: ProtocolSummary[] }>(
      await fetch(this.url('/protocols')),
    );
    return body.protocols;
  }

  async createSession(protocol: string, blackboard?: Record<string, unknown>): Promise<SessionView> {
    return asJson(
      await fetch(this.url('/sessions'), {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ protocol, blackboard: blackboard ?? {} }),
      }),
    );
  }

  async getSession(id: string): Promise<SessionView> {
    return asJson(await fetch(this.url(`/sessions/${id}`)));
  }

  async submitOutcome(
    id: string,
    leaf: string,
    outcome: 'success' | 'failure',
    elapsed?: number | string,
  ): Promise<SessionView> {
    return asJson(
      await fetch(this.url(`/sessions/${id}/outcome`), {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ leaf, outcome, ...(elapsed !== undefined ? { elapsed } : {}) }),
      }),
    );
  }

  /** Acknowledge a timer wait: moves virtual time to the next wake. */
  async advance(id: string): Promise<SessionView> {
    return asJson(
      await fetch(this.url(`/sessions/${id}/outcome`), {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ leaf: ADVANCE, outcome: null }),
      }),
    );
  }

  async forkSession(id: string): Promise<SessionView> {
    return asJson(await fetch(this.url(`/sessions/${id}/fork`), { method: 'POST' }));
  }

  async getTrace(id: string, page = 0, pageSize = 100): Promise<TracePage> {
    return asJson(
      await fetch(this.url(`/sessions/${id}/trace?page=${page}&page_size=${pageSize}`)),
    );
  }
}
