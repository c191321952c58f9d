/**
 * Client-side countdown for regulatory clocks.
 *
 * The gateway is the authority on deadline status; between polls the console
 * recomputes the remaining time cosmetically. The flip matches the server's
 * semantics exactly: a clock is still pending at the due instant and becomes
 * overdue strictly after it. Notified clocks keep their met/late state.
 */

import type { DeadlineWire } from './types.js';

export type CountdownState = 'pending' | 'overdue' | 'met' | 'late';

export function parseInstant(iso: string): number {
  return Date.parse(iso);
}

/** Signed whole seconds until due (negative once past). */
export function remainingSeconds(deadline: DeadlineWire, nowMs: number): number {
  return Math.floor((parseInstant(deadline.due_at) - nowMs) / 1000);
}

/** Pending holds up to and including the due instant; overdue strictly after. */
export function countdownState(deadline: DeadlineWire, nowMs: number): CountdownState {
  if (deadline.notified_at !== null) {
    return parseInstant(deadline.notified_at) <= parseInstant(deadline.due_at) ? 'met' : 'late';
  }
  return nowMs <= parseInstant(deadline.due_at) ? 'pending' : 'overdue';
}

/** "50:00" below an hour, "1:05:09" above, clamped at zero. */
export function formatRemaining(seconds: number): string {
  const clamped = Math.max(0, seconds);
  const h = Math.floor(clamped / 3600);
  const m = Math.floor((clamped % 3600) / 60);
  const s = clamped % 60;
  const mm = String(m).padStart(2, '0');
  const ss = String(s).padStart(2, '0');
  return h > 0 ? `${h}:${mm}:${ss}` : `${mm}:${ss}`;
}

/**
 * Clock drift between the console and the server, from the server-computed
 * remaining seconds in the last poll. Above the threshold the board shows a
 * drift warning instead of trusting the local clock quietly.
 */
export function clockDriftSeconds(deadline: DeadlineWire, nowMs: number): number {
  return Math.abs(remainingSeconds(deadline, nowMs) - deadline.remaining_seconds);
}

export const DRIFT_WARNING_SECONDS = 60;

export function renderCountdown(deadline: DeadlineWire, nowMs: number): string {
  const state = countdownState(deadline, nowMs);
  const remaining = remainingSeconds(deadline, nowMs);
  const drift = clockDriftSeconds(deadline, nowMs);
  let body: string;
  switch (state) {
    case 'pending':
      body = `<span class="remaining">${formatRemaining(remaining)} remaining</span>`;
      break;
    case 'overdue':
      body = `<span class="overdue-alert">OVERDUE by ${formatRemaining(-remaining)}</span>`;
      break;
    case 'met':
      body = `<span class="badge badge-met">Met</span>`;
      break;
    case 'late':
      body = `<span class="badge badge-late">Late</span>`;
      break;
  }
  const warning =
    state === 'pending' && drift > DRIFT_WARNING_SECONDS
      ? `<span class="drift-warning">clock drift ${drift}s vs server</span>`
      : '';
  return (
    `<div class="countdown countdown-${state}" data-rule="${deadline.rule_id}">` +
    `<span class="rule">${deadline.rule_id}</span>` +
    `<span class="authority">${deadline.authority}</span>` +
    `<span class="due">due ${deadline.due_at}</span>` +
    body +
    warning +
    `</div>`
  );
}

export function renderCountdownBoard(deadlines: DeadlineWire[], nowMs: number): string {
  if (deadlines.length === 0) {
    return `<div class="countdown-board empty">no armed deadlines</div>`;
  }
  return `<div class="countdown-board">${deadlines.map((d) => renderCountdown(d, nowMs)).join('')}</div>`;
}
