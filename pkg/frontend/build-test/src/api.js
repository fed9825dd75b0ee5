// Typed client for the /api endpoints. Every mutation the UI performs
// goes through here, and each call is appended to an optional log so a
// session can be replayed headlessly (see replay.ts).
export class ApiError extends Error {
    status;
    phase;
    constructor(status, message, phase) {
        super(message);
        this.status = status;
        this.phase = phase;
    }
}
async function request(base, method, path, body) {
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
    base;
    log;
    constructor(base, log) {
        this.base = base;
        this.log = log;
    }
    record(method, path, body, deferred = false) {
        this.log?.push({ kind: "call", method, path, body, deferred });
    }
    call(method, path, body, deferred = false) {
        this.record(method, path, body, deferred);
        return request(this.base, method, path, body);
    }
    async createSession(config) {
        const out = await this.call("POST", "/api/sessions", config);
        return out.session_id;
    }
    control(sid, verb, atEpoch) {
        const body = atEpoch === undefined ? undefined : { at_epoch: atEpoch };
        return this.call("POST", `/api/sessions/${sid}/${verb}`, body, atEpoch !== undefined);
    }
    start(sid, atEpoch) {
        return this.control(sid, "start", atEpoch);
    }
    pause(sid, atEpoch) {
        return this.control(sid, "pause", atEpoch);
    }
    resume(sid, atEpoch) {
        return this.control(sid, "resume", atEpoch);
    }
    reset(sid, atEpoch) {
        return this.control(sid, "reset", atEpoch);
    }
    setLambda(sid, value) {
        return this.call("POST", `/api/sessions/${sid}/lambda`, { value });
    }
    addAnnotation(sid, exampleIndex, direction, atEpoch) {
        const body = { example_index: exampleIndex, direction };
        if (atEpoch !== undefined)
            body.at_epoch = atEpoch;
        return this.call("POST", `/api/sessions/${sid}/annotations`, body, atEpoch !== undefined);
    }
    deleteAnnotation(sid, id) {
        return this.call("DELETE", `/api/sessions/${sid}/annotations/${id}`);
    }
    getState(sid, fromEpoch = 0) {
        // reads are not part of the replayable action log
        return request(this.base, "GET", `/api/sessions/${sid}/state?from_epoch=${fromEpoch}`);
    }
    getDataset(sid) {
        return request(this.base, "GET", `/api/sessions/${sid}/dataset`);
    }
    getGrid(sid, resolution = 100) {
        return request(this.base, "GET", `/api/sessions/${sid}/grid?resolution=${resolution}`);
    }
    saveExperiment(sid, name, createdAt) {
        // the client stamps created_at so a replayed log saves an identical record
        const body = { name, created_at: createdAt ?? new Date().toISOString() };
        return this.call("POST", `/api/sessions/${sid}/experiments`, body);
    }
    async listExperiments() {
        const out = await request(this.base, "GET", "/api/experiments");
        return out.experiments;
    }
    deleteExperiment(name) {
        return this.call("DELETE", `/api/experiments/${encodeURIComponent(name)}`);
    }
    /** Poll until the session reaches `phase`; recorded as a barrier so a
     * replay waits the same way instead of racing the trainer. */
    async waitForPhase(sid, phase, timeoutMs = 60_000) {
        this.log?.push({ kind: "wait_phase", phase, session_path: `/api/sessions/${sid}` });
        const deadline = Date.now() + timeoutMs;
        for (;;) {
            const state = await this.getState(sid, 1_000_000);
            if (state.phase === phase)
                return state;
            if (state.phase === "faulted")
                throw new ApiError(500, `session faulted: ${state.fault}`);
            if (Date.now() > deadline)
                throw new ApiError(408, `timed out waiting for ${phase}`);
            await new Promise((resolve) => setTimeout(resolve, 25));
        }
    }
}
