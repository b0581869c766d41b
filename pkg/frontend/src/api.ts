// Typed client for the exploration session server. Every mutation goes
// through POST /sessions/{id}/action; state updates come back through the
// event endpoints so the view can stay a pure fold of the log.

export interface DesignPayload {
  id: string;
  latent: number[];
  cw: number | null;
  cwSource: string;
  dimensions: {
    lengthWaterline: number;
    beamWaterline: number;
    draft: number;
    displacementVolume: number;
  };
  constraintsSatisfied: boolean;
  feasible?: boolean;
}

export interface SessionEvent {
  t: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface EmbeddingPayload {
  designIds: string[];
  points: [number, number][];
  hullPolygon: [number, number][];
}

export interface HullSurface {
  id: string;
  cw: number | null;
  cwSource: string;
  stations: number[];
  waterlines: number[];
  halfBreadths: number[][];
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

export class Client {
  constructor(private base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = ((await response.json()) as { detail?: string }).detail ?? detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createParticipant(seed: number) {
    return this.request<{ participantId: string; modeOrder: string[] }>(
      "POST", "/participants", { seed });
  }

  participantState(pid: string) {
    return this.request<{
      participantId: string;
      modeOrder: string[];
      completed: string[];
      nextMode: string | null;
      questionnaireSubmitted: boolean;
    }>("GET", `/participants/${pid}`);
  }

  startMode(pid: string, mode: string) {
    return this.request<{ sessionId: string }>(
      "POST", `/participants/${pid}/start-mode`, { mode });
  }

  sessionState(sid: string) {
    return this.request<Record<string, unknown>>("GET", `/sessions/${sid}`);
  }

  action<T = Record<string, unknown>>(sid: string, verb: string,
                                      params: Record<string, unknown> = {}) {
    return this.request<T>("POST", `/sessions/${sid}/action`, { verb, params });
  }

  events(sid: string, since: number) {
    return this.request<{ since: number; events: SessionEvent[]; next: number }>(
      "GET", `/sessions/${sid}/events?since=${since}`);
  }

  design(sid: string, designId: string) {
    return this.request<HullSurface>("GET", `/sessions/${sid}/designs/${designId}`);
  }

  questionnaire(pid: string, answers: Record<string, string>) {
    return this.request<{ stored: boolean }>(
      "POST", `/participants/${pid}/questionnaire`, { answers });
  }
}
