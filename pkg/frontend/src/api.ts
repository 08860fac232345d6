import { ModelInfo, Snapshot, parseModelInfo, parseSnapshot } from './types.js';

export interface ApiErrorBody {
  error?: string;
  detail?: string;
  [key: string]: unknown;
}

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.detail ?? body.error ?? `request failed with ${status}`);
    this.status = status;
    this.body = body;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ConfiguratorClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = '', fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.base = baseUrl.replace(/\/$/, '');
    this.fetchFn = fetchFn;
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(`${this.base}${path}`, init);
    if (response.status === 204) return null;
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      throw new ApiError(response.status, (body ?? {}) as ApiErrorBody);
    }
    return body;
  }

  async getModel(): Promise<ModelInfo> {
    return parseModelInfo(await this.request('/model'));
  }

  async createSession(): Promise<string> {
    const body = (await this.request('/sessions', { method: 'POST' })) as {
      id?: unknown;
    };
    if (typeof body?.id !== 'string') {
      throw new ApiError(500, { error: 'bad-session-id' });
    }
    return body.id;
  }

  async getState(sessionId: string): Promise<Snapshot> {
    return parseSnapshot(await this.request(`/sessions/${sessionId}`));
  }

  async assign(
    sessionId: string,
    variable: string,
    value: string,
  ): Promise<Snapshot> {
    return parseSnapshot(
      await this.request(`/sessions/${sessionId}/assign`, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ variable, value }),
      }),
    );
  }

  async undo(sessionId: string): Promise<Snapshot> {
    return parseSnapshot(
      await this.request(`/sessions/${sessionId}/undo`, { method: 'POST' }),
    );
  }

  async deleteSession(sessionId: string): Promise<void> {
    await this.request(`/sessions/${sessionId}`, { method: 'DELETE' });
  }
}
