/**
 * Gateway client: thin typed wrapper over the /v1/ API.
 *
 * Writes are optimistic: each carries the revision count the console last
 * saw, and a 409 (stale_write) answer triggers a re-fetch so the operator
 * retries against current state instead of clobbering someone else's entry.
 */

import type {
  ApiErrorWire,
  CompletenessWire,
  DeadlineWire,
  RegistryEntry,
  ReportWire,
  ValueWire,
  ViewWire,
} from './types.js';

export class GatewayError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail?: unknown,
  ) {
    super(message);
  }
}

export interface SessionConfig {
  apiBaseUrl: string;
  token: string;
  pollIntervalSeconds?: number;
}

export class GatewayClient {
  constructor(
    private readonly config: SessionConfig,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.config.apiBaseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.config.token}`,
        ...(body !== undefined ? { 'Content-Type': 'application/json' } : {}),
      },
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    if (!response.ok) {
      let error: ApiErrorWire = { code: 'http_error', message: `HTTP ${response.status}` };
      try {
        error = (await response.json()) as ApiErrorWire;
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new GatewayError(response.status, error.code, error.message, error.detail);
    }
    return (await response.json()) as T;
  }

  getRegistry(): Promise<{ elements: RegistryEntry[] }> {
    return this.request('GET', '/v1/registry');
  }

  listIncidents(): Promise<{ incidents: string[] }> {
    return this.request('GET', '/v1/incidents');
  }

  getReport(ref: string): Promise<ReportWire> {
    return this.request('GET', `/v1/incidents/${encodeURIComponent(ref)}`);
  }

  getCompleteness(ref: string): Promise<CompletenessWire> {
    return this.request('GET', `/v1/incidents/${encodeURIComponent(ref)}/completeness`);
  }

  getAudiences(): Promise<{ audiences: string[] }> {
    return this.request('GET', '/v1/audiences');
  }

  getView(ref: string, audience: string): Promise<ViewWire> {
    const path = `/v1/incidents/${encodeURIComponent(ref)}/view?audience=${encodeURIComponent(audience)}`;
    return this.request('GET', path);
  }

  getDeadlines(ref: string): Promise<{ deadlines: DeadlineWire[] }> {
    return this.request('GET', `/v1/incidents/${encodeURIComponent(ref)}/deadlines`);
  }

  /**
   * Populate one element. `sourceRevisionCount` is the count from the read
   * the operator edited against; the gateway rejects the write as stale if
   * the report has moved on.
   */
  async setElement(
    ref: string,
    key: string,
    value: ValueWire,
    sourceRevisionCount: number,
  ): Promise<{ seq: number; revision_count: number }> {
    return this.request('PUT', `/v1/incidents/${encodeURIComponent(ref)}/elements/${key}`, {
      value,
      expected_revision_count: sourceRevisionCount,
    });
  }

  /**
   * Write with one automatic retry against re-fetched state on rejection.
   * Returns the fresh report after a stale write so the caller can re-render.
   */
  async setElementOrRefetch(
    ref: string,
    key: string,
    value: ValueWire,
    sourceRevisionCount: number,
  ): Promise<{ ok: boolean; report?: ReportWire }> {
    try {
      await this.setElement(ref, key, value, sourceRevisionCount);
      return { ok: true };
    } catch (error) {
      if (error instanceof GatewayError && error.code === 'stale_write') {
        return { ok: false, report: await this.getReport(ref) };
      }
      throw error;
    }
  }
}
