import { Snapshot } from './types.js';
import { UiState } from './store.js';

export interface Handlers {
  onValueClick: (variable: string, value: string) => void;
  onUndo: () => void;
  onRetry: (() => void) | null;
}

/** The full configuration implied by a complete snapshot, in variable order. */
export function resolvedConfiguration(snapshot: Snapshot): string[] {
  const chosen = new Map<string, string>();
  for (const b of snapshot.assignments) chosen.set(b.variable, b.value);
  for (const b of snapshot.forced) chosen.set(b.variable, b.value);
  return snapshot.domains
    .map((group) => chosen.get(group.variable))
    .filter((value): value is string => value !== undefined);
}

/** Rebuild the whole view from one state; no DOM state survives a render. */
export function render(root: HTMLElement, state: UiState, handlers: Handlers): void {
  root.textContent = '';
  const { snapshot, error, pending } = state;

  if (error !== null) {
    const banner = document.createElement('div');
    banner.id = 'error-banner';
    banner.setAttribute('role', 'alert');
    banner.textContent = error;
    if (handlers.onRetry) {
      const retry = document.createElement('button');
      retry.id = 'retry-btn';
      retry.textContent = 'retry';
      retry.addEventListener('click', handlers.onRetry);
      banner.append(' ', retry);
    }
    root.appendChild(banner);
  }

  if (snapshot === null) {
    const loading = document.createElement('p');
    loading.id = 'loading';
    loading.textContent = 'loading…';
    root.appendChild(loading);
    return;
  }

  const count = document.createElement('p');
  count.id = 'solution-count';
  count.textContent = `${snapshot.solutionCount} configurations remain`;
  root.appendChild(count);

  if (snapshot.complete) {
    const banner = document.createElement('div');
    banner.id = 'completion-banner';
    banner.textContent = `complete: (${resolvedConfiguration(snapshot).join(', ')})`;
    root.appendChild(banner);
  }

  const assigned = new Map(snapshot.assignments.map((b) => [b.variable, b.value]));
  const forced = new Map(snapshot.forced.map((b) => [b.variable, b.value]));

  for (const group of snapshot.domains) {
    const section = document.createElement('section');
    section.className = 'variable-group';
    section.dataset.variable = group.variable;

    const heading = document.createElement('h2');
    heading.textContent = group.variable;
    if (forced.has(group.variable)) {
      const badge = document.createElement('span');
      badge.className = 'forced-badge';
      badge.textContent = `forced: ${forced.get(group.variable)}`;
      heading.append(' ', badge);
    }
    section.appendChild(heading);

    for (const entry of group.values) {
      const button = document.createElement('button');
      button.type = 'button';
      button.className = 'value-btn';
      button.dataset.variable = group.variable;
      button.dataset.value = entry.value;
      button.textContent = entry.value;
      const isAssigned = assigned.get(group.variable) === entry.value;
      if (isAssigned) button.classList.add('assigned');
      // a value stays clickable only while the newest snapshot marks it
      // valid, its variable is unassigned, and no mutation is in flight
      button.disabled =
        !entry.valid || pending || assigned.has(group.variable);
      if (!entry.valid) button.classList.add('invalid');
      button.addEventListener('click', () => {
        if (!button.disabled) {
          handlers.onValueClick(group.variable, entry.value);
        }
      });
      section.appendChild(button);
    }
    root.appendChild(section);
  }

  const undo = document.createElement('button');
  undo.id = 'undo-btn';
  undo.textContent = 'undo';
  undo.disabled = pending || snapshot.assignments.length === 0;
  undo.addEventListener('click', handlers.onUndo);
  root.appendChild(undo);
}

export function enabledValues(root: HTMLElement): Set<string> {
  const out = new Set<string>();
  for (const node of root.querySelectorAll<HTMLButtonElement>('button.value-btn')) {
    if (!node.disabled) {
      out.add(`${node.dataset.variable}=${node.dataset.value}`);
    }
  }
  return out;
}
