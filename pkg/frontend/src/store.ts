import { Snapshot } from './types.js';

// Rendering is last-write-wins: each accepted server response gets the next
// sequence number, and anything older than the newest applied snapshot is
// dropped. Reads may overlap; mutations are kept single-flight by the app.

export interface UiState {
  snapshot: Snapshot | null;
  seq: number;
  pending: boolean;
  error: string | null;
}

export class StateStore {
  private state: UiState = { snapshot: null, seq: 0, pending: false, error: null };
  private nextSeq = 1;
  private listeners: ((state: UiState) => void)[] = [];

  get current(): UiState {
    return this.state;
  }

  subscribe(listener: (state: UiState) => void): void {
    this.listeners.push(listener);
  }

  allocateSeq(): number {
    return this.nextSeq++;
  }

  /** Apply a snapshot unless a newer one already rendered. */
  accept(snapshot: Snapshot, seq: number): boolean {
    if (seq <= this.state.seq) return false;
    this.patch({ snapshot, seq, error: null });
    return true;
  }

  setPending(pending: boolean): void {
    this.patch({ pending });
  }

  setError(error: string | null): void {
    this.patch({ error });
  }

  private patch(changes: Partial<UiState>): void {
    this.state = { ...this.state, ...changes };
    for (const listener of this.listeners) listener(this.state);
  }
}
