// Session state machine. The store mirrors the server: counts, iteration
// and curves are always replaced by fetched values, never derived
// locally. Verdicts are optimistic with client idempotency ids; a
// verdict that cannot reach the server stays queued and is retried with
// the same id, so a double submit can never double-count.

import {
  ApiClient,
  CandidateCard,
  IterationCurve,
  SessionStatus,
  StaleModelError,
  Stratum,
} from './api.js';

export type VerdictClass = 'conservative' | 'liberal' | 'nonpolitical';

export interface PendingVerdict {
  node: string;
  cls: VerdictClass;
  verdictId: string;
}

export interface StoreView {
  status: SessionStatus | null;
  queue: CandidateCard[];
  stratum: Stratum;
  curves: IterationCurve[];
  pending: PendingVerdict[];
  staleQueue: boolean;
  retraining: boolean;
  lastError: string | null;
}

export type Listener = (view: StoreView) => void;

let counter = 0;

export function nextVerdictId(prefix = 'v'): string {
  counter += 1;
  return `${prefix}-${Date.now().toString(36)}-${counter}`;
}

export class SessionStore {
  private status: SessionStatus | null = null;
  private queue: CandidateCard[] = [];
  private stratum: Stratum = 'ambiguous';
  private curves: IterationCurve[] = [];
  private pending: PendingVerdict[] = [];
  private staleQueue = false;
  private retraining = false;
  private lastError: string | null = null;
  private listeners: Listener[] = [];
  private pollDelayMs: number;

  constructor(private api: ApiClient, options: { pollDelayMs?: number } = {}) {
    this.pollDelayMs = options.pollDelayMs ?? 250;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  view(): StoreView {
    return {
      status: this.status,
      queue: [...this.queue],
      stratum: this.stratum,
      curves: this.curves,
      pending: [...this.pending],
      staleQueue: this.staleQueue,
      retraining: this.retraining,
      lastError: this.lastError,
    };
  }

  private emit(): void {
    const snapshot = this.view();
    for (const listener of this.listeners) listener(snapshot);
  }

  async load(stratum: Stratum = this.stratum): Promise<void> {
    this.status = await this.api.session();
    this.retraining = this.status.state === 'retraining';
    await this.refreshQueue(stratum);
    this.curves = await this.api.curves();
    this.emit();
  }

  async refreshQueue(stratum: Stratum = this.stratum): Promise<void> {
    this.stratum = stratum;
    const response = await this.api.candidates(stratum);
    this.queue = response.items;
    this.staleQueue = false;
    this.emit();
  }

  /** Optimistically removes the card; requeues the verdict on network
   * failure and flags the queue on a model-version conflict. */
  async submit(node: string, cls: VerdictClass): Promise<string> {
    if (this.retraining) throw new Error('retraining in progress');
    if (!this.status) throw new Error('session not loaded');
    const verdict: PendingVerdict = { node, cls, verdictId: nextVerdictId() };
    this.queue = this.queue.filter((card) => card.node !== node);
    this.emit();
    return this.send(verdict);
  }

  /** Skips are local: the card is dropped without creating label state. */
  skip(node: string): void {
    this.queue = this.queue.filter((card) => card.node !== node);
    this.emit();
  }

  private async send(verdict: PendingVerdict): Promise<string> {
    if (!this.status) throw new Error('session not loaded');
    try {
      const response = await this.api.submitVerdict(
        verdict.node,
        verdict.cls,
        verdict.verdictId,
        this.status.model_version,
      );
      this.status = { ...this.status, label_counts: response.label_counts };
      this.lastError = null;
      this.emit();
      return response.status;
    } catch (error) {
      if (error instanceof StaleModelError) {
        this.staleQueue = true;
        this.lastError = 'model changed; refresh the queue';
        this.emit();
        return 'stale';
      }
      this.pending.push(verdict);
      this.lastError = 'verdict stored locally; will retry';
      this.emit();
      return 'queued';
    }
  }

  /** Replays queued verdicts with their original idempotency ids. */
  async retryPending(): Promise<number> {
    const toSend = [...this.pending];
    this.pending = [];
    let delivered = 0;
    for (const verdict of toSend) {
      const status = await this.send(verdict);
      if (status !== 'queued') delivered += 1;
    }
    return delivered;
  }

  /** Locks controls, polls status until the service leaves retraining,
   * then reloads queue and curves from the server. */
  async retrain(poll: { maxTries?: number; delayMs?: number } = {}): Promise<void> {
    const maxTries = poll.maxTries ?? 600;
    const delayMs = poll.delayMs ?? this.pollDelayMs;
    await this.api.retrain();
    this.retraining = true;
    this.emit();
    for (let attempt = 0; attempt < maxTries; attempt += 1) {
      const status = await this.api.status();
      if (status.state === 'idle') {
        this.status = status;
        this.retraining = false;
        await this.refreshQueue();
        this.curves = await this.api.curves();
        this.emit();
        return;
      }
      if (delayMs > 0) {
        await new Promise((resolve) => setTimeout(resolve, delayMs));
      }
    }
    throw new Error('retrain did not finish in time');
  }
}
