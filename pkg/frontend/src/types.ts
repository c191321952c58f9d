/**
 * Wire types mirroring the gateway's /v1/ JSON payloads.
 * The console never invents domain values: everything displayed comes off
 * these shapes as returned by the server.
 */

export type ValueKind =
  | 'text'
  | 'priority_rating'
  | 'contact'
  | 'timestamp'
  | 'event_list'
  | 'item_list'
  | 'evidence_list'
  | 'duration'
  | 'rto_progress'
  | 'notification_ledger';

export interface TimelineEventWire {
  ordinal: number;
  at: string | null;
  description: string;
}

export interface NotificationEntryWire {
  party: string;
  direction: 'internal' | 'external';
  status: 'pending' | 'notified' | 'acknowledged';
  at: string | null;
}

export interface ValueWire {
  kind: ValueKind;
  text?: string;
  label?: string;
  band?: string;
  score?: number;
  name?: string;
  role?: string;
  channel?: string;
  at?: string;
  events?: TimelineEventWire[];
  items?: string[];
  evidence_ids?: string[];
  seconds?: number;
  target_seconds?: number;
  elapsed_seconds?: number;
  on_track?: boolean;
  entries?: NotificationEntryWire[];
}

export interface ElementStateWire {
  state: 'unknown' | 'populated';
  value?: ValueWire;
  set_by?: string | null;
  set_at?: string | null;
}

export interface RegistryEntry {
  key: string;
  group: string;
  group_label: string;
  kind: ValueKind;
  question_tags: string[];
  label: string;
  aliases: string[];
}

export interface ReportWire {
  incident_ref: string;
  phase: string;
  created_at: string;
  created_by: string;
  revision_count: number;
  elements: Record<string, ElementStateWire>;
}

export interface ViewWire {
  audience: string;
  incident_ref: string;
  generated_at: string;
  source_revision_count: number;
  withheld_count: number;
  elements: Record<string, ElementStateWire>;
}

export interface DeadlineWire {
  rule_id: string;
  authority: string;
  window_seconds: number;
  basis: string;
  start_at: string;
  due_at: string;
  notified_at: string | null;
  status: 'pending' | 'met' | 'late' | 'overdue';
  remaining_seconds: number;
}

export interface CompletenessWire {
  fraction: number;
  populated_count: number;
  unknown_keys: string[];
}

export interface ApiErrorWire {
  code: string;
  message: string;
  detail?: unknown;
}

export const ELEMENT_COUNT = 25;
export const GROUP_COUNT = 7;
