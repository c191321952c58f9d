/**
 * Browser entry point: mounts the report form, the countdown board and the
 * audience preview, and keeps them in sync with the gateway by polling.
 *
 * Configuration comes from the query string / local storage so the static
 * bundle needs no build-time settings:
 *   ?api=http://127.0.0.1:8478&token=...&incident=ukraine2015
 */

import { GatewayError } from './api.js';
import { renderAudiencePreview } from './audiencePreview.js';
import { renderCountdownBoard } from './countdown.js';
import { renderReportForm } from './reportForm.js';
import { ConsoleSession, Snapshot } from './session.js';

function param(name: string, fallback: string): string {
  const fromQuery = new URLSearchParams(window.location.search).get(name);
  if (fromQuery) {
    window.localStorage.setItem(`air.${name}`, fromQuery);
    return fromQuery;
  }
  return window.localStorage.getItem(`air.${name}`) ?? fallback;
}

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing mount point #${id}`);
  return node;
}

function showBanner(message: string): void {
  const banner = el('banner');
  banner.textContent = message;
  banner.classList.add('visible');
}

function clearBanner(): void {
  el('banner').classList.remove('visible');
}

async function renderPreview(session: ConsoleSession, incident: string, audience: string) {
  try {
    const view = await session.client.getView(incident, audience);
    el('preview').innerHTML = renderAudiencePreview(view);
  } catch (error) {
    if (error instanceof GatewayError && error.code === 'undeclared_audience') {
      el('preview').innerHTML = `<div class="inline-error">audience "${audience}" is not declared</div>`;
      return;
    }
    throw error;
  }
}

async function main(): Promise<void> {
  const apiBaseUrl = param('api', 'http://127.0.0.1:8478');
  const token = param('token', '');
  const incident = param('incident', 'ukraine2015');

  const session = new ConsoleSession({ apiBaseUrl, token });
  let tick: ReturnType<typeof setInterval> | null = null;

  session.onError((error) => {
    showBanner(`gateway unreachable or rejected the request: ${error.message}`);
  });

  session.onSnapshot((snapshot: Snapshot) => {
    void (async () => {
      clearBanner();
      const registry = await session.getRegistry();
      el('report').innerHTML = renderReportForm(registry, snapshot.report);
      const paint = () => {
        el('deadlines').innerHTML = renderCountdownBoard(snapshot.deadlines, Date.now());
      };
      paint();
      if (tick !== null) clearInterval(tick);
      tick = setInterval(paint, 1000);
    })();
  });

  const audienceSelect = el('audience') as HTMLSelectElement;
  try {
    const { audiences } = await session.client.getAudiences();
    audienceSelect.innerHTML = audiences
      .map((a) => `<option value="${a}">${a}</option>`)
      .join('');
    audienceSelect.addEventListener('change', () => {
      void renderPreview(session, incident, audienceSelect.value);
    });
  } catch (error) {
    showBanner(`cannot load audiences: ${(error as Error).message}`);
  }

  await session.focus(incident);
  if (audienceSelect.value) {
    await renderPreview(session, incident, audienceSelect.value);
  }
}

void main();
