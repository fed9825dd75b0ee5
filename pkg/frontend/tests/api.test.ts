import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient, ApiError, type CallLogEntry } from "../src/api.js";
import { loggedSessionIds, replayLog } from "../src/replay.js";
import type { SessionConfig } from "../src/types.js";

const CONFIG: SessionConfig = {
  dataset: { shape: "blobs", n_train: 9, n_test: 50, noise: null, seed: 4 },
  model: { hidden_layers: [8], activation: "tanh", seed: 4, input_dim: 2 },
  loss: { steepness: 20, lambda: 1 },
  max_epochs: 60,
  snapshot_every: 10,
};

interface Seen {
  method: string;
  path: string;
  body: unknown;
}

function fakeFetch(handler: (seen: Seen) => { status?: number; payload: unknown }) {
  const seen: Seen[] = [];
  const impl = async (url: string | URL | Request, init?: RequestInit) => {
    const record = {
      method: init?.method ?? "GET",
      path: String(url),
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    };
    seen.push(record);
    const out = handler(record);
    return new Response(JSON.stringify(out.payload), { status: out.status ?? 200 });
  };
  return { seen, impl: impl as typeof fetch };
}

test("client calls carry the documented paths and bodies", async (t) => {
  const { seen, impl } = fakeFetch(({ path }) => {
    if (path.endsWith("/api/sessions")) return { status: 201, payload: { session_id: "aa11" } };
    if (path.includes("/annotations"))
      return {
        status: 201,
        payload: { id: 0, example_index: 2, direction: [1, 0], created_at: 0 },
      };
    return { payload: { phase: "running", epoch: 0 } };
  });
  t.mock.method(globalThis, "fetch", impl);

  const log: CallLogEntry[] = [];
  const api = new ApiClient("http://host", log);
  const sid = await api.createSession(CONFIG);
  assert.equal(sid, "aa11");
  await api.start(sid);
  const stored = await api.addAnnotation(sid, 2, [2, 0]);
  assert.deepEqual(stored.direction, [1, 0]);

  assert.deepEqual(
    seen.map((s) => [s.method, s.path]),
    [
      ["POST", "http://host/api/sessions"],
      ["POST", "http://host/api/sessions/aa11/start"],
      ["POST", "http://host/api/sessions/aa11/annotations"],
    ],
  );
  assert.deepEqual(seen[2].body, { example_index: 2, direction: [2, 0] });
  assert.equal(log.length, 3);
  assert.equal(log[1].deferred, false);
});

test("epoch-tagged calls are marked deferred in the log", async (t) => {
  const { impl } = fakeFetch(() => ({ payload: { phase: "paused", epoch: 30 } }));
  t.mock.method(globalThis, "fetch", impl);
  const log: CallLogEntry[] = [];
  const api = new ApiClient("http://host", log);
  await api.pause("aa11", 30);
  assert.equal(log[0].deferred, true);
  assert.deepEqual(log[0].body, { at_epoch: 30 });
});

test("reads are not recorded in the action log", async (t) => {
  const { impl } = fakeFetch(() => ({
    payload: { phase: "idle", epoch: 0, history: [], annotations: [] },
  }));
  t.mock.method(globalThis, "fetch", impl);
  const log: CallLogEntry[] = [];
  const api = new ApiClient("http://host", log);
  await api.getState("aa11");
  assert.equal(log.length, 0);
});

test("errors surface status and phase", async (t) => {
  const { impl } = fakeFetch(() => ({
    status: 409,
    payload: { error: "cannot pause while session is idle", phase: "idle" },
  }));
  t.mock.method(globalThis, "fetch", impl);
  const api = new ApiClient("http://host");
  await assert.rejects(
    () => api.pause("aa11"),
    (error: ApiError) => error.status === 409 && error.phase === "idle",
  );
});

test("save stamps created_at so replays reproduce the record", async (t) => {
  const { seen, impl } = fakeFetch(() => ({ status: 201, payload: { name: "x" } }));
  t.mock.method(globalThis, "fetch", impl);
  const log: CallLogEntry[] = [];
  await new ApiClient("http://host", log).saveExperiment("aa11", "x");
  const body = seen[0].body as { created_at: string };
  assert.ok(body.created_at.length > 10);
  assert.deepEqual(log[0].body, seen[0].body);
});

test("replay remaps session ids minted by the new server", async (t) => {
  const log: CallLogEntry[] = [
    { kind: "call", method: "POST", path: "/api/sessions", body: CONFIG, deferred: false },
    { kind: "call", method: "POST", path: "/api/sessions/old1/start", deferred: false },
    { kind: "wait_phase", phase: "finished", session_path: "/api/sessions/old1" },
    {
      kind: "call",
      method: "POST",
      path: "/api/sessions/old1/experiments",
      body: { name: "r", created_at: "t" },
      deferred: false,
    },
  ];
  assert.deepEqual(loggedSessionIds(log), ["old1"]);

  const { seen, impl } = fakeFetch(({ path }) => {
    if (path.endsWith("/api/sessions")) return { status: 201, payload: { session_id: "new9" } };
    if (path.includes("/state")) return { payload: { phase: "finished" } };
    return { payload: {} };
  });
  t.mock.method(globalThis, "fetch", impl);
  await replayLog("http://host", log);
  const paths = seen.map((s) => s.path);
  assert.ok(paths.includes("http://host/api/sessions/new9/start"));
  assert.ok(paths.includes("http://host/api/sessions/new9/experiments"));
  assert.ok(!paths.some((p) => p.includes("old1")));
});
