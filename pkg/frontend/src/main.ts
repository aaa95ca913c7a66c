// Entry point: build the store against the same-origin API and wire the
// page. A full reload rebuilds the identical view from server state.

import { ApiClient } from './api.js';
import { SessionStore } from './state.js';
import { attach } from './ui.js';

const root = document.getElementById('app');
if (root) {
  const store = new SessionStore(new ApiClient(''));
  attach(root, store);

  const strata = document.getElementById('strata');
  strata?.addEventListener('change', (event) => {
    const select = event.target as HTMLSelectElement;
    void store.refreshQueue(select.value as never);
  });

  const retry = document.getElementById('retry-pending');
  retry?.addEventListener('click', () => void store.retryPending());

  void store.load();
  // verdicts stranded by network failures retry in the background
  setInterval(() => {
    if (store.view().pending.length > 0) void store.retryPending();
  }, 5000);
}
