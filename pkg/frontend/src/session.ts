/**
 * Console session: one active incident, polled from the gateway.
 *
 * The console holds no authoritative state — every render is driven by the
 * last successful fetch, and each rendered surface carries the revision
 * count it came from. Failures surface as a blocking banner, never silence.
 */

import { GatewayClient, GatewayError, SessionConfig } from './api.js';
import type { DeadlineWire, RegistryEntry, ReportWire } from './types.js';

export const DEFAULT_POLL_INTERVAL_SECONDS = 5;

export interface Snapshot {
  report: ReportWire;
  deadlines: DeadlineWire[];
  fetchedAtMs: number;
}

export type SnapshotListener = (snapshot: Snapshot) => void;
export type ErrorListener = (error: GatewayError | Error) => void;

export class ConsoleSession {
  readonly client: GatewayClient;
  private incidentRef: string | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private registry: RegistryEntry[] | null = null;
  private snapshotListeners: SnapshotListener[] = [];
  private errorListeners: ErrorListener[] = [];
  private readonly pollIntervalMs: number;

  constructor(config: SessionConfig, fetchFn: typeof fetch = fetch) {
    this.client = new GatewayClient(config, fetchFn);
    this.pollIntervalMs = (config.pollIntervalSeconds ?? DEFAULT_POLL_INTERVAL_SECONDS) * 1000;
  }

  onSnapshot(listener: SnapshotListener): void {
    this.snapshotListeners.push(listener);
  }

  onError(listener: ErrorListener): void {
    this.errorListeners.push(listener);
  }

  /** Registry is static server data; fetched once and cached for the session. */
  async getRegistry(): Promise<RegistryEntry[]> {
    if (this.registry === null) {
      this.registry = (await this.client.getRegistry()).elements;
    }
    return this.registry;
  }

  get activeIncident(): string | null {
    return this.incidentRef;
  }

  /** Switch the session to an incident and start polling it. */
  async focus(incidentRef: string): Promise<void> {
    this.incidentRef = incidentRef;
    this.stop();
    await this.poll();
    this.timer = setInterval(() => void this.poll(), this.pollIntervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async poll(): Promise<Snapshot | null> {
    if (this.incidentRef === null) return null;
    try {
      const [report, deadlines] = await Promise.all([
        this.client.getReport(this.incidentRef),
        this.client.getDeadlines(this.incidentRef),
      ]);
      const snapshot: Snapshot = {
        report,
        deadlines: deadlines.deadlines,
        fetchedAtMs: Date.now(),
      };
      for (const listener of this.snapshotListeners) listener(snapshot);
      return snapshot;
    } catch (error) {
      for (const listener of this.errorListeners) listener(error as Error);
      return null;
    }
  }
}
