/**
 * Audience preview: what one audience would see, plus how many of the 25
 * elements the matrix withholds from them. Values render verbatim from the
 * gateway's redacted view; the console adds no transformation.
 */

import { escapeHtml } from './reportForm.js';
import type { ElementStateWire, ViewWire } from './types.js';
import { ELEMENT_COUNT } from './types.js';

export function withheldCount(view: ViewWire): number {
  return ELEMENT_COUNT - Object.keys(view.elements).length;
}

function shortValue(state: ElementStateWire): string {
  if (state.state !== 'populated' || !state.value) return 'pending';
  const v = state.value;
  switch (v.kind) {
    case 'text':
      return v.text ?? '';
    case 'timestamp':
      return v.at ?? '';
    case 'priority_rating':
      return `${v.label} (${v.band}, ${v.score})`;
    case 'contact':
      return `${v.name} — ${v.role} (${v.channel})`;
    case 'duration':
      return `${v.seconds}s`;
    case 'item_list':
      return (v.items ?? []).join('; ');
    case 'evidence_list':
      return (v.evidence_ids ?? []).join(', ');
    case 'event_list':
      return `${(v.events ?? []).length} events`;
    case 'rto_progress':
      return `${v.elapsed_seconds}s of ${v.target_seconds}s (${v.on_track ? 'on track' : 'off track'})`;
    case 'notification_ledger':
      return (v.entries ?? []).map((e) => `${e.party}: ${e.status}`).join('; ');
  }
}

export function renderAudiencePreview(view: ViewWire): string {
  const withheld = withheldCount(view);
  const rows = Object.entries(view.elements)
    .map(([key, state]) => {
      const pending = state.state !== 'populated';
      return (
        `<tr class="${pending ? 'pending' : 'populated'}" data-key="${key}">` +
        `<td class="key">${key}</td>` +
        `<td class="value">${escapeHtml(shortValue(state))}</td></tr>`
      );
    })
    .join('');
  return (
    `<div class="audience-preview" data-audience="${escapeHtml(view.audience)}" ` +
    `data-revision="${view.source_revision_count}">` +
    `<header><span class="audience-name">${escapeHtml(view.audience)}</span>` +
    `<span class="withheld-indicator" data-withheld="${withheld}">` +
    `${withheld} of ${ELEMENT_COUNT} elements withheld</span></header>` +
    `<table class="preview-table">${rows}</table>` +
    `</div>`
  );
}
