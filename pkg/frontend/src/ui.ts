// DOM layer: renders the store view and wires verdict controls. All
// displayed numbers come straight from the last server responses held in
// the store.

import { CandidateCard } from './api.js';
import { nearestPoint, renderCurvesSvg } from './curves.js';
import { SessionStore, StoreView, VerdictClass } from './state.js';

const VERDICT_KEYS: Record<string, VerdictClass> = {
  c: 'conservative',
  l: 'liberal',
  n: 'nonpolitical',
};

export function formatProbabilities(card: CandidateCard): string {
  return Object.entries(card.probabilities)
    .map(([name, p]) => `${name} ${(p * 100).toFixed(1)}%`)
    .join(' · ');
}

function cardHtml(card: CandidateCard, first: boolean): string {
  return (
    `<li class="card${first ? ' focused' : ''}" data-node="${card.node}">` +
    `<div class="title">${card.title}</div>` +
    `<div class="meta">${card.category} · ${card.stratum}</div>` +
    `<div class="probs">${formatProbabilities(card)}</div>` +
    `<div class="controls">` +
    `<button data-verdict="conservative">conservative (c)</button>` +
    `<button data-verdict="liberal">liberal (l)</button>` +
    `<button data-verdict="nonpolitical">non-political (n)</button>` +
    `<button data-verdict="skip">skip (s)</button>` +
    `</div></li>`
  );
}

export function sessionHtml(view: StoreView): string {
  const status = view.status;
  if (!status) return '<p class="empty">loading session…</p>';
  const counts = Object.entries(status.label_counts)
    .map(([name, count]) => `<span class="count">${name}: <b id="count-${name}">${count}</b></span>`)
    .join(' ');
  const yields = Object.entries(status.yield)
    .map(([iteration, y]) => `<li>iteration ${iteration}: ${y.applied} applied / ${y.shown} shown</li>`)
    .join('');
  return (
    `<div class="session">` +
    `<span>iteration <b id="iteration">${status.iteration}</b></span>` +
    `<span>model v<b id="model-version">${status.model_version}</b></span>` +
    `<span id="state" class="${view.retraining ? 'busy' : 'idle'}">${
      view.retraining ? 'retraining' : 'idle'
    }</span>` +
    `${counts}` +
    `</div><ul class="yield">${yields}</ul>`
  );
}

export function render(root: HTMLElement, view: StoreView): void {
  const session = root.querySelector('#session');
  if (session) session.innerHTML = sessionHtml(view);

  const queue = root.querySelector('#queue');
  if (queue) {
    if (view.queue.length === 0) {
      queue.innerHTML = '<p class="empty">queue drained; refresh or switch stratum</p>';
    } else {
      queue.innerHTML = `<ul class="cards">${view.queue
        .map((card, index) => cardHtml(card, index === 0))
        .join('')}</ul>`;
    }
  }

  const banner = root.querySelector('#banner');
  if (banner) {
    if (view.staleQueue) {
      banner.innerHTML =
        '<div class="warn">model version changed; <button id="refresh-queue">refresh queue</button></div>';
    } else if (view.lastError) {
      banner.innerHTML = `<div class="warn">${view.lastError}</div>`;
    } else {
      banner.innerHTML = '';
    }
  }

  const curves = root.querySelector('#curves');
  if (curves) {
    curves.innerHTML = renderCurvesSvg(view.curves);
  }

  const readout = root.querySelector('#curve-readout');
  if (readout && view.curves.length > 0) {
    const latest = view.curves[view.curves.length - 1];
    const at95 = nearestPoint(latest.curve, 0.95);
    if (at95) {
      readout.textContent =
        `at threshold ${at95.threshold.toFixed(2)}: ` +
        `${(at95.fraction * 100).toFixed(1)}% of products accepted`;
    }
  }

  const retrainButton = root.querySelector<HTMLButtonElement>('#retrain');
  if (retrainButton) retrainButton.disabled = view.retraining;
  root
    .querySelectorAll<HTMLButtonElement>('.controls button')
    .forEach((button) => (button.disabled = view.retraining));
}

export function attach(root: HTMLElement, store: SessionStore): void {
  store.subscribe((view) => render(root, view));

  root.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (target.id === 'retrain') {
      void store.retrain();
      return;
    }
    if (target.id === 'refresh-queue') {
      void store.refreshQueue();
      return;
    }
    const verdict = target.getAttribute('data-verdict');
    if (verdict) {
      const card = target.closest('[data-node]');
      const node = card?.getAttribute('data-node');
      if (node) {
        if (verdict === 'skip') store.skip(node);
        else void store.submit(node, verdict as VerdictClass);
      }
    }
  });

  root.addEventListener('keydown', (event) => {
    const keyboard = event as KeyboardEvent;
    const view = store.view();
    if (view.retraining || view.queue.length === 0) return;
    const first = view.queue[0];
    if (keyboard.key === 's') {
      store.skip(first.node);
    } else if (keyboard.key in VERDICT_KEYS) {
      void store.submit(first.node, VERDICT_KEYS[keyboard.key]);
    }
  });
}
