import { describe, expect, it } from 'vitest';

import { StateStore } from '../src/store.js';
import { Snapshot } from '../src/types.js';

function snap(count: string): Snapshot {
  return {
    assignments: [],
    domains: [],
    solutionCount: count,
    complete: false,
    forced: [],
  };
}

describe('StateStore', () => {
  it('applies snapshots in sequence order', () => {
    const store = new StateStore();
    const first = store.allocateSeq();
    const second = store.allocateSeq();
    expect(store.accept(snap('2'), first)).toBe(true);
    expect(store.accept(snap('3'), second)).toBe(true);
    expect(store.current.snapshot?.solutionCount).toBe('3');
  });

  it('drops stale responses (last write wins)', () => {
    const store = new StateStore();
    const older = store.allocateSeq();
    const newer = store.allocateSeq();
    expect(store.accept(snap('9'), newer)).toBe(true);
    expect(store.accept(snap('8'), older)).toBe(false);
    expect(store.current.snapshot?.solutionCount).toBe('9');
  });

  it('clears the error banner on an accepted snapshot', () => {
    const store = new StateStore();
    store.setError('boom');
    expect(store.current.error).toBe('boom');
    store.accept(snap('1'), store.allocateSeq());
    expect(store.current.error).toBeNull();
  });

  it('notifies subscribers on every change', () => {
    const store = new StateStore();
    let seen = 0;
    store.subscribe(() => seen++);
    store.setPending(true);
    store.setPending(false);
    expect(seen).toBe(2);
  });
});
