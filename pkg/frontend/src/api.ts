import {
  CreatedSession,
  Envelope,
  FilterResult,
  HeatmapDoc,
  InfluenceDoc,
  RadarDoc,
  ScenarioPage,
  SessionInfo,
  SummaryDoc,
} from './types';

export type Params = Record<string, string | number | undefined>;

// Transport is the injectable seam: the browser entry point uses
// HttpTransport, tests inject a fixture-backed fake with the same shape.
export interface Transport {
  get(path: string, params?: Params): Promise<Envelope<unknown>>;
  post(path: string, body: unknown): Promise<Envelope<unknown>>;
  del(path: string): Promise<Envelope<unknown>>;
}

export class HttpTransport implements Transport {
  constructor(private readonly baseUrl: string = '') {}

  private url(path: string, params?: Params): string {
    const search = new URLSearchParams();
    for (const [key, value] of Object.entries(params ?? {})) {
      if (value !== undefined) search.set(key, String(value));
    }
    const query = search.toString();
    return this.baseUrl + path + (query ? `?${query}` : '');
  }

  async get(path: string, params?: Params): Promise<Envelope<unknown>> {
    const response = await fetch(this.url(path, params));
    return (await response.json()) as Envelope<unknown>;
  }

  async post(path: string, body: unknown): Promise<Envelope<unknown>> {
    const response = await fetch(this.url(path), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    return (await response.json()) as Envelope<unknown>;
  }

  async del(path: string): Promise<Envelope<unknown>> {
    const response = await fetch(this.url(path), { method: 'DELETE' });
    return (await response.json()) as Envelope<unknown>;
  }
}

function unwrap<T>(envelope: Envelope<unknown>): T {
  if (envelope.status !== 'ok' || envelope.payload === undefined) {
    const error = envelope.error;
    throw new Error(error ? `${error.code}: ${error.message}` : 'malformed envelope');
  }
  return envelope.payload as T;
}

export class ApiClient {
  // Per-channel sequence numbers implement last-request-wins: a response
  // that arrives after a newer request on the same channel is discarded.
  private sequence = new Map<string, number>();

  constructor(private readonly transport: Transport) {}

  private async latest<T>(channel: string, run: () => Promise<T>): Promise<T | null> {
    const token = (this.sequence.get(channel) ?? 0) + 1;
    this.sequence.set(channel, token);
    const result = await run();
    return this.sequence.get(channel) === token ? result : null;
  }

  async sessionInfo(sessionId: string): Promise<SessionInfo> {
    return unwrap(await this.transport.get(`/api/sessions/${sessionId}`));
  }

  async scenarios(
    sessionId: string,
    options: { filter?: string; sort?: string; dir?: string; page?: number } = {},
  ): Promise<ScenarioPage | null> {
    return this.latest('scenarios', async () =>
      unwrap<ScenarioPage>(
        await this.transport.get(`/api/sessions/${sessionId}/scenarios`, {
          filter: options.filter,
          sort: options.sort,
          dir: options.dir,
          page: options.page,
        }),
      ),
    );
  }

  async summary(sessionId: string, subject: string, bins = 8): Promise<SummaryDoc> {
    return unwrap(
      await this.transport.get(`/api/sessions/${sessionId}/summary`, { subject, bins }),
    );
  }

  async influence(sessionId: string, scenarioIds: number[]): Promise<InfluenceDoc | null> {
    return this.latest('influence', async () =>
      unwrap<InfluenceDoc>(
        await this.transport.get(`/api/sessions/${sessionId}/influence`, {
          scenarios: scenarioIds.join(','),
        }),
      ),
    );
  }

  async heatmap(sessionId: string, scenarioId: number): Promise<HeatmapDoc | null> {
    return this.latest('heatmap', async () =>
      unwrap<HeatmapDoc>(
        await this.transport.get(`/api/sessions/${sessionId}/rivals/heatmap`, {
          scenario: scenarioId,
        }),
      ),
    );
  }

  async radar(
    sessionId: string,
    scenarioId: number,
    method: string,
    highlight?: string,
  ): Promise<RadarDoc | null> {
    return this.latest('radar', async () =>
      unwrap<RadarDoc>(
        await this.transport.get(`/api/sessions/${sessionId}/rivals/radar`, {
          scenario: scenarioId,
          method,
          highlight,
        }),
      ),
    );
  }

  async appendFilter(sessionId: string, expression: string): Promise<FilterResult> {
    return unwrap(
      await this.transport.post(`/api/sessions/${sessionId}/filters`, {
        filter: expression,
      }),
    );
  }

  async undoFilter(sessionId: string): Promise<FilterResult> {
    return unwrap(await this.transport.del(`/api/sessions/${sessionId}/filters/last`));
  }

  async createSession(body: unknown): Promise<CreatedSession> {
    return unwrap(await this.transport.post('/api/sessions', body));
  }
}
