/**
 * Console acceptance: the three exit criteria, each exact, against the
 * recorded gateway fixtures (stub).
 */

import { describe, expect, it } from 'vitest';

import deadlinesFixture from '../test/fixtures/deadlines.json';
import registryFixture from '../test/fixtures/registry.json';
import viewFixture from '../test/fixtures/regulator.view.json';
import reportFixture from '../test/fixtures/ukraine2015.report.json';
import { withheldCount } from './audiencePreview.js';
import { countdownState, parseInstant } from './countdown.js';
import { countPendingFields, renderReportForm } from './reportForm.js';
import type { DeadlineWire, RegistryEntry, ReportWire, ViewWire } from './types.js';
import { ELEMENT_COUNT } from './types.js';

const registry = registryFixture.elements as RegistryEntry[];
const report = reportFixture as ReportWire;
const armed = (deadlinesFixture.deadlines as DeadlineWire[])[0];
const regulatorView = viewFixture as unknown as ViewWire;

describe('console acceptance', () => {
  it('renders 7 group sections and 25 fields with 11 pending markers for the fixture', () => {
    const html = renderReportForm(registry, report);
    expect((html.match(/<section class="element-group"/g) ?? []).length).toBe(7);
    expect((html.match(/<div class="field (?:pending|populated)"/g) ?? []).length).toBe(25);
    expect(countPendingFields(html)).toBe(11);
  });

  it('flips the countdown to overdue exactly at the due boundary', () => {
    const due = parseInstant(armed.due_at);
    expect(countdownState(armed, due - 1000)).toBe('pending');
    expect(countdownState(armed, due)).toBe('pending'); // inclusive at due
    expect(countdownState(armed, due + 1000)).toBe('overdue');
  });

  it('reports withheld counts as 25 minus the grant size', () => {
    expect(withheldCount(regulatorView)).toBe(ELEMENT_COUNT - 14);
    const full: ViewWire = { ...regulatorView, elements: report.elements, withheld_count: 0 };
    expect(withheldCount(full)).toBe(0);
    const empty: ViewWire = { ...regulatorView, elements: {}, withheld_count: 25 };
    expect(withheldCount(empty)).toBe(25);
  });
});
