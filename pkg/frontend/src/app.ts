import { ApiError, ConfiguratorClient } from './api.js';
import { render } from './render.js';
import { StateStore } from './store.js';
import { SchemaError, Snapshot } from './types.js';

// The app performs no domain math: it forwards clicks to the server and
// renders whatever full state comes back. At most one mutating request is in
// flight; clicks landing while one is pending are ignored (their buttons are
// disabled anyway).

export class App {
  readonly store = new StateStore();
  private readonly client: ConfiguratorClient;
  private readonly root: HTMLElement;
  private sessionId: string | null = null;
  private inFlight: Promise<void> = Promise.resolve();
  private retryAction: (() => void) | null = null;

  constructor(root: HTMLElement, client: ConfiguratorClient) {
    this.root = root;
    this.client = client;
    this.store.subscribe(() => this.renderNow());
    this.renderNow();
  }

  async init(): Promise<void> {
    const task = this.inFlight.then(async () => {
      this.sessionId = await this.client.createSession();
      const snapshot = await this.client.getState(this.sessionId);
      this.store.accept(snapshot, this.store.allocateSeq());
    });
    this.inFlight = task.catch(() => undefined);
    return task;
  }

  /** Re-fetch the session after a reload; renders identically. */
  async resume(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    const snapshot = await this.client.getState(sessionId);
    this.store.accept(snapshot, this.store.allocateSeq());
  }

  get session(): string | null {
    return this.sessionId;
  }

  clickValue(variable: string, value: string): Promise<void> {
    return this.mutate(() => {
      if (this.sessionId === null) throw new SchemaError('no session yet');
      return this.client.assign(this.sessionId, variable, value);
    });
  }

  clickUndo(): Promise<void> {
    return this.mutate(() => {
      if (this.sessionId === null) throw new SchemaError('no session yet');
      return this.client.undo(this.sessionId);
    });
  }

  /** Resolves when every action started so far has settled. */
  async settled(): Promise<void> {
    let last;
    do {
      last = this.inFlight;
      await last;
    } while (last !== this.inFlight);
  }

  private mutate(send: () => Promise<Snapshot>): Promise<void> {
    if (this.store.current.pending) return this.inFlight;
    this.store.setPending(true);
    const seq = this.store.allocateSeq();
    const task = this.inFlight
      .then(() => send())
      .then(
        (snapshot) => {
          this.retryAction = null;
          this.store.accept(snapshot, seq);
        },
        (failure) => {
          if (failure instanceof ApiError) {
            // the server refused the step; current state stands
            this.retryAction = null;
            this.store.setError(failure.message);
          } else {
            // transport trouble: offer a retry of the same action
            this.retryAction = () => {
              this.store.setError(null);
              void this.mutate(send);
            };
            this.store.setError(`request failed: ${String(failure)}`);
          }
        },
      )
      .finally(() => this.store.setPending(false));
    this.inFlight = task;
    return task;
  }

  private renderNow(): void {
    render(this.root, this.store.current, {
      onValueClick: (variable, value) => void this.clickValue(variable, value),
      onUndo: () => void this.clickUndo(),
      onRetry: this.retryAction,
    });
  }
}

export function mount(root: HTMLElement, baseUrl: string): App {
  const app = new App(root, new ConfiguratorClient(baseUrl));
  void app.init();
  return app;
}
