// Wire types for the session API. The server is the single source of truth;
// every mutating call returns a full Snapshot and the UI renders only that.

export interface Binding {
  variable: string;
  value: string;
}

export interface ValueFlag {
  value: string;
  valid: boolean;
}

export interface DomainGroup {
  variable: string;
  values: ValueFlag[];
}

export interface Snapshot {
  assignments: Binding[];
  domains: DomainGroup[];
  solutionCount: string;
  complete: boolean;
  forced: Binding[];
}

export interface ModelInfo {
  variables: { name: string; values: string[] }[];
}

export class SchemaError extends Error {}

function isBinding(raw: unknown): raw is Binding {
  if (typeof raw !== 'object' || raw === null) return false;
  const b = raw as Record<string, unknown>;
  return typeof b.variable === 'string' && typeof b.value === 'string';
}

export function parseSnapshot(raw: unknown): Snapshot {
  if (typeof raw !== 'object' || raw === null) {
    throw new SchemaError('snapshot is not an object');
  }
  const s = raw as Record<string, unknown>;
  if (!Array.isArray(s.assignments) || !s.assignments.every(isBinding)) {
    throw new SchemaError('snapshot.assignments is malformed');
  }
  if (!Array.isArray(s.forced) || !s.forced.every(isBinding)) {
    throw new SchemaError('snapshot.forced is malformed');
  }
  if (typeof s.solutionCount !== 'string' || !/^\d+$/.test(s.solutionCount)) {
    throw new SchemaError('snapshot.solutionCount must be a decimal string');
  }
  if (typeof s.complete !== 'boolean') {
    throw new SchemaError('snapshot.complete must be a boolean');
  }
  if (!Array.isArray(s.domains)) {
    throw new SchemaError('snapshot.domains is malformed');
  }
  for (const group of s.domains) {
    if (typeof group !== 'object' || group === null) {
      throw new SchemaError('domain group is not an object');
    }
    const g = group as Record<string, unknown>;
    if (typeof g.variable !== 'string' || !Array.isArray(g.values)) {
      throw new SchemaError('domain group is malformed');
    }
    for (const entry of g.values) {
      const e = entry as Record<string, unknown>;
      if (typeof e?.value !== 'string' || typeof e?.valid !== 'boolean') {
        throw new SchemaError(`domain values of ${g.variable} are malformed`);
      }
    }
  }
  return raw as Snapshot;
}

export function parseModelInfo(raw: unknown): ModelInfo {
  if (typeof raw !== 'object' || raw === null) {
    throw new SchemaError('model info is not an object');
  }
  const m = raw as Record<string, unknown>;
  if (!Array.isArray(m.variables)) {
    throw new SchemaError('model info has no variables');
  }
  for (const entry of m.variables) {
    const v = entry as Record<string, unknown>;
    if (
      typeof v?.name !== 'string' ||
      !Array.isArray(v?.values) ||
      !v.values.every((label) => typeof label === 'string')
    ) {
      throw new SchemaError('model variable entry is malformed');
    }
  }
  return raw as ModelInfo;
}
