import { describe, expect, it, vi } from 'vitest';

import reportFixture from '../test/fixtures/ukraine2015.report.json';
import { GatewayClient, GatewayError } from './api.js';

const CONFIG = { apiBaseUrl: 'http://gateway:8478', token: 'console-token' };

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

describe('GatewayClient', () => {
  it('sends the bearer token on reads', async () => {
    const fetchFn = vi.fn().mockResolvedValue(jsonResponse(200, reportFixture));
    const client = new GatewayClient(CONFIG, fetchFn as unknown as typeof fetch);
    const report = await client.getReport('ukraine2015');
    expect(report.incident_ref).toBe('ukraine2015');
    const [url, init] = fetchFn.mock.calls[0];
    expect(url).toBe('http://gateway:8478/v1/incidents/ukraine2015');
    expect(init.headers.Authorization).toBe('Bearer console-token');
  });

  it('raises a typed error with the stable code', async () => {
    const fetchFn = vi.fn().mockResolvedValue(
      jsonResponse(404, { code: 'unknown_incident', message: 'no incident' }),
    );
    const client = new GatewayClient(CONFIG, fetchFn as unknown as typeof fetch);
    await expect(client.getReport('ghost')).rejects.toMatchObject({
      status: 404,
      code: 'unknown_incident',
    });
  });

  it('carries the source revision count on writes', async () => {
    const fetchFn = vi.fn().mockResolvedValue(jsonResponse(200, { seq: 19, revision_count: 19 }));
    const client = new GatewayClient(CONFIG, fetchFn as unknown as typeof fetch);
    await client.setElement('ukraine2015', 'safety_impact', { kind: 'text', text: 'none known' }, 18);
    const [, init] = fetchFn.mock.calls[0];
    expect(JSON.parse(init.body)).toEqual({
      value: { kind: 'text', text: 'none known' },
      expected_revision_count: 18,
    });
  });

  it('re-fetches the report when the gateway rejects a stale write', async () => {
    const fetchFn = vi
      .fn()
      .mockResolvedValueOnce(jsonResponse(409, { code: 'stale_write', message: 'moved on' }))
      .mockResolvedValueOnce(jsonResponse(200, reportFixture));
    const client = new GatewayClient(CONFIG, fetchFn as unknown as typeof fetch);
    const outcome = await client.setElementOrRefetch(
      'ukraine2015', 'safety_impact', { kind: 'text', text: 'stale' }, 3);
    expect(outcome.ok).toBe(false);
    expect(outcome.report?.revision_count).toBe((reportFixture as { revision_count: number }).revision_count);
    expect(fetchFn).toHaveBeenCalledTimes(2);
    expect(fetchFn.mock.calls[1][0]).toBe('http://gateway:8478/v1/incidents/ukraine2015');
  });

  it('propagates non-stale write failures', async () => {
    const fetchFn = vi.fn().mockResolvedValue(
      jsonResponse(422, { code: 'kind_mismatch', message: 'wrong kind' }),
    );
    const client = new GatewayClient(CONFIG, fetchFn as unknown as typeof fetch);
    await expect(
      client.setElementOrRefetch('ukraine2015', 'detection_timestamp', { kind: 'text', text: 'x' }, 1),
    ).rejects.toBeInstanceOf(GatewayError);
  });
});
