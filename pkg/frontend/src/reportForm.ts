/**
 * Grouped report form: seven group sections, all 25 fields, kind-appropriate
 * inputs. Pending (unknown) fields are visually distinct from populated
 * ones — knowing what is still missing is half the point of the board.
 */

import type { ElementStateWire, RegistryEntry, ReportWire, ValueWire } from './types.js';

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

function textValue(value: ValueWire | undefined): string {
  if (!value) return '';
  switch (value.kind) {
    case 'text':
      return value.text ?? '';
    case 'timestamp':
      return value.at ?? '';
    case 'duration':
      return value.seconds !== undefined ? String(value.seconds) : '';
    default:
      return '';
  }
}

function renderInput(entry: RegistryEntry, state: ElementStateWire): string {
  const value = state.value;
  const key = entry.key;
  switch (entry.kind) {
    case 'text':
      return `<textarea name="${key}" data-kind="text" rows="2">${escapeHtml(textValue(value))}</textarea>`;
    case 'timestamp':
      return `<input name="${key}" data-kind="timestamp" type="text" placeholder="2015-12-23T13:30:00Z" value="${escapeHtml(textValue(value))}">`;
    case 'duration':
      return `<input name="${key}" data-kind="duration" type="number" min="0" placeholder="seconds" value="${escapeHtml(textValue(value))}">`;
    case 'priority_rating': {
      const label = value?.label ?? '';
      const band = value?.band ?? '';
      const score = value?.score !== undefined ? String(value.score) : '';
      const bands = ['low', 'medium', 'high', 'critical'];
      const options = ['', ...bands]
        .map((b) => `<option value="${b}"${b === band ? ' selected' : ''}>${b || '(band)'}</option>`)
        .join('');
      return (
        `<input name="${key}.label" data-kind="priority_rating" type="text" placeholder="matrix label" value="${escapeHtml(label)}">` +
        `<select name="${key}.band">${options}</select>` +
        `<input name="${key}.score" type="number" min="1" placeholder="score" value="${escapeHtml(score)}">`
      );
    }
    case 'contact': {
      const name = value?.name ?? '';
      const role = value?.role ?? '';
      const channel = value?.channel ?? '';
      return (
        `<input name="${key}.name" data-kind="contact" type="text" placeholder="name" value="${escapeHtml(name)}">` +
        `<input name="${key}.role" type="text" placeholder="role" value="${escapeHtml(role)}">` +
        `<input name="${key}.channel" type="text" placeholder="channel" value="${escapeHtml(channel)}">`
      );
    }
    case 'item_list': {
      const items = value?.items ?? [];
      return `<textarea name="${key}" data-kind="item_list" rows="3" placeholder="one item per line">${escapeHtml(items.join('\n'))}</textarea>`;
    }
    case 'event_list': {
      const events = value?.events ?? [];
      const rows = events
        .map(
          (e) =>
            `<li class="timeline-event"><span class="ordinal">${e.ordinal}</span>` +
            `<span class="event-at">${escapeHtml(e.at ?? 'time unknown')}</span>` +
            `<span class="event-desc">${escapeHtml(e.description)}</span></li>`,
        )
        .join('');
      return (
        `<ol class="timeline" data-kind="event_list">${rows}</ol>` +
        `<input name="${key}.new" type="text" placeholder="add event description...">` +
        `<input name="${key}.new_at" type="text" placeholder="instant (optional)">`
      );
    }
    case 'evidence_list': {
      const ids = value?.evidence_ids ?? [];
      const rows = ids.map((id) => `<li class="evidence-id"><code>${escapeHtml(id)}</code></li>`).join('');
      return `<ul class="evidence" data-kind="evidence_list">${rows}</ul>`;
    }
    case 'rto_progress': {
      const target = value?.target_seconds !== undefined ? String(value.target_seconds) : '';
      const elapsed = value?.elapsed_seconds !== undefined ? String(value.elapsed_seconds) : '';
      const onTrack = value?.on_track ?? false;
      return (
        `<input name="${key}.target_seconds" data-kind="rto_progress" type="number" min="0" placeholder="target s" value="${target}">` +
        `<input name="${key}.elapsed_seconds" type="number" min="0" placeholder="elapsed s" value="${elapsed}">` +
        `<label class="ontrack"><input name="${key}.on_track" type="checkbox"${onTrack ? ' checked' : ''}> on track</label>`
      );
    }
    case 'notification_ledger': {
      const entries = value?.entries ?? [];
      const rows = entries
        .map(
          (e) =>
            `<li class="ledger-entry"><span class="party">${escapeHtml(e.party)}</span>` +
            `<span class="direction">${e.direction}</span>` +
            `<span class="status status-${e.status}">${e.status}</span>` +
            `<span class="notified-at">${escapeHtml(e.at ?? '')}</span></li>`,
        )
        .join('');
      return `<ul class="ledger" data-kind="notification_ledger">${rows}</ul>`;
    }
  }
}

function renderField(entry: RegistryEntry, state: ElementStateWire): string {
  const pending = state.state !== 'populated';
  const classes = pending ? 'field pending' : 'field populated';
  const marker = pending
    ? '<span class="pending-marker">pending</span>'
    : `<span class="set-by">set by ${escapeHtml(state.set_by ?? '?')} at ${escapeHtml(state.set_at ?? '?')}</span>`;
  return (
    `<div class="${classes}" data-key="${entry.key}">` +
    `<label for="${entry.key}">${escapeHtml(entry.label)}${marker}</label>` +
    renderInput(entry, state) +
    `</div>`
  );
}

/**
 * Render the whole form. Sections follow registry order; every one of the
 * 25 elements gets a field whether populated or pending.
 */
export function renderReportForm(registry: RegistryEntry[], report: ReportWire): string {
  const sections: string[] = [];
  let currentGroup: string | null = null;
  let open: string[] = [];

  const flush = () => {
    if (currentGroup !== null) {
      sections.push(`<section class="element-group" data-group="${currentGroup}">${open.join('')}</section>`);
    }
    open = [];
  };

  for (const entry of registry) {
    if (entry.group !== currentGroup) {
      flush();
      currentGroup = entry.group;
      open.push(`<h2 class="group-header">${escapeHtml(entry.group_label)}</h2>`);
    }
    const state = report.elements[entry.key] ?? { state: 'unknown' };
    open.push(renderField(entry, state));
  }
  flush();

  return (
    `<form class="report-form" data-incident="${escapeHtml(report.incident_ref)}" ` +
    `data-revision="${report.revision_count}" data-phase="${report.phase}">` +
    sections.join('') +
    `</form>`
  );
}

export function countPendingFields(html: string): number {
  return (html.match(/class="field pending"/g) ?? []).length;
}
