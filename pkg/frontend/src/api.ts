// Typed client for the /api endpoints. Every mutation the UI performs
// goes through here, and each call is appended to an optional log so a
// session can be replayed headlessly (see replay.ts).

import type {
  Annotation,
  DatasetPayload,
  ExperimentRecord,
  GridPayload,
  Phase,
  SessionConfig,
  SessionStatePayload,
} from "./types.js";

export interface CallLogEntry {
  kind: "call" | "wait_phase";
  method?: string;
  path?: string;
  body?: unknown;
  // calls carrying an epoch tag resolve only when the boundary is
  // reached, so replay must not serialize on them
  deferred?: boolean;
  phase?: Phase;
  session_path?: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public phase?: string,
  ) {
    super(message);
  }
}

async function request(base: string, method: string, path: string, body?: unknown) {
  const response = await fetch(base + path, {
    method,
    headers: body === undefined ? undefined : { "content-type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const text = await response.text();
  const payload = text ? JSON.parse(text) : {};
  if (!response.ok) {
    throw new ApiError(response.status, payload.error ?? response.statusText, payload.phase);
  }
  return payload;
}

export class ApiClient {
  constructor(
    readonly base: string,
    readonly log?: CallLogEntry[],
  ) {}

  private record(method: string, path: string, body?: unknown, deferred = false) {
    this.log?.push({ kind: "call", method, path, body, deferred });
  }

  private call(method: string, path: string, body?: unknown, deferred = false) {
    this.record(method, path, body, deferred);
    return request(this.base, method, path, body);
  }

  async createSession(config: SessionConfig): Promise<string> {
    const out = await this.call("POST", "/api/sessions", config);
    return out.session_id as string;
  }

  private control(sid: string, verb: string, atEpoch?: number) {
    const body = atEpoch === undefined ? undefined : { at_epoch: atEpoch };
    return this.call("POST", `/api/sessions/${sid}/${verb}`, body, atEpoch !== undefined) as Promise<{
      phase: Phase;
      epoch: number;
    }>;
  }

  start(sid: string, atEpoch?: number) {
    return this.control(sid, "start", atEpoch);
  }

  pause(sid: string, atEpoch?: number) {
    return this.control(sid, "pause", atEpoch);
  }

  resume(sid: string, atEpoch?: number) {
    return this.control(sid, "resume", atEpoch);
  }

  reset(sid: string, atEpoch?: number) {
    return this.control(sid, "reset", atEpoch);
  }

  setLambda(sid: string, value: number): Promise<{ lambda: number }> {
    return this.call("POST", `/api/sessions/${sid}/lambda`, { value });
  }

  addAnnotation(
    sid: string,
    exampleIndex: number,
    direction: [number, number],
    atEpoch?: number,
  ): Promise<Annotation> {
    const body: Record<string, unknown> = { example_index: exampleIndex, direction };
    if (atEpoch !== undefined) body.at_epoch = atEpoch;
    return this.call(
      "POST",
      `/api/sessions/${sid}/annotations`,
      body,
      atEpoch !== undefined,
    ) as Promise<Annotation>;
  }

  deleteAnnotation(sid: string, id: number) {
    return this.call("DELETE", `/api/sessions/${sid}/annotations/${id}`);
  }

  getState(sid: string, fromEpoch = 0): Promise<SessionStatePayload> {
    // reads are not part of the replayable action log
    return request(this.base, "GET", `/api/sessions/${sid}/state?from_epoch=${fromEpoch}`);
  }

  getDataset(sid: string): Promise<DatasetPayload> {
    return request(this.base, "GET", `/api/sessions/${sid}/dataset`);
  }

  getGrid(sid: string, resolution = 100): Promise<GridPayload> {
    return request(this.base, "GET", `/api/sessions/${sid}/grid?resolution=${resolution}`);
  }

  saveExperiment(sid: string, name: string, createdAt?: string): Promise<ExperimentRecord> {
    // the client stamps created_at so a replayed log saves an identical record
    const body = { name, created_at: createdAt ?? new Date().toISOString() };
    return this.call("POST", `/api/sessions/${sid}/experiments`, body) as Promise<ExperimentRecord>;
  }

  async listExperiments(): Promise<ExperimentRecord[]> {
    const out = await request(this.base, "GET", "/api/experiments");
    return out.experiments as ExperimentRecord[];
  }

  deleteExperiment(name: string) {
    return this.call("DELETE", `/api/experiments/${encodeURIComponent(name)}`);
  }

  /** Poll until the session reaches `phase`; recorded as a barrier so a
   * replay waits the same way instead of racing the trainer. */
  async waitForPhase(sid: string, phase: Phase, timeoutMs = 60_000): Promise<SessionStatePayload> {
    this.log?.push({ kind: "wait_phase", phase, session_path: `/api/sessions/${sid}` });
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const state = await this.getState(sid, 1_000_000);
      if (state.phase === phase) return state;
      if (state.phase === "faulted") throw new ApiError(500, `session faulted: ${state.fault}`);
      if (Date.now() > deadline) throw new ApiError(408, `timed out waiting for ${phase}`);
      await new Promise((resolve) => setTimeout(resolve, 25));
    }
  }
}
