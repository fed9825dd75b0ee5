// End to end: a scripted annotator session against the real training
// service, captured as an API call log, then replayed headlessly; the
// replayed experiment records must be identical to the originals.

import assert from "node:assert/strict";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { after, before, test } from "node:test";

import { ApiClient, type CallLogEntry } from "../src/api.js";
import { replayLog } from "../src/replay.js";
import type { ExperimentRecord, SessionConfig } from "../src/types.js";

let server: ChildProcess;
let base: string;

before(async () => {
  const storeDir = join(mkdtempSync(join(tmpdir(), "steergrad-e2e-")), "store");
  server = spawn("python3", ["-m", "steergrad.cli", "serve", "--port", "0", "--store-dir", storeDir], {
    stdio: ["ignore", "pipe", "inherit"],
  });
  base = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("server did not start")), 30_000);
    server.stdout!.on("data", (chunk: Buffer) => {
      const match = chunk.toString().match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    server.on("exit", (code) => reject(new Error(`server exited early: ${code}`)));
  });
  // the bound address prints before the server accepts; wait for readiness
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      await fetch(`${base}/api/experiments`);
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("server never became ready");
      await new Promise((resolve) => setTimeout(resolve, 50));
    }
  }
});

after(() => {
  server.kill("SIGINT");
});

const CONFIG: SessionConfig = {
  dataset: { shape: "blobs", n_train: 9, n_test: 50, noise: null, seed: 4 },
  model: { hidden_layers: [8], activation: "tanh", seed: 4, input_dim: 2 },
  loss: { steepness: 20.0, lambda: 1.0 },
  max_epochs: 60,
  snapshot_every: 10,
};

function sortKeys(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value && typeof value === "object") {
    return Object.fromEntries(
      Object.entries(value as Record<string, unknown>)
        .sort(([a], [b]) => (a < b ? -1 : 1))
        .map(([k, v]) => [k, sortKeys(v)]),
    );
  }
  return value;
}

const stable = (records: ExperimentRecord[]) => JSON.stringify(sortKeys(records));

test("scripted session's call log replays to identical experiment records", async () => {
  const log: CallLogEntry[] = [];
  const api = new ApiClient(base, log);

  // the interactive workflow: run, pause at a boundary, save, annotate,
  // resume to the end, save again
  const sid = await api.createSession(CONFIG);
  const pauseApplied = api.pause(sid, 30); // epoch-tagged: resolves at the boundary
  await api.start(sid);
  const paused = await pauseApplied;
  assert.deepEqual(paused, { phase: "paused", epoch: 30 });

  await api.saveExperiment(sid, "plain-labels");
  const first = await api.addAnnotation(sid, 0, [2, 0]);
  assert.deepEqual(first.direction, [1, 0]); // server normalized
  await api.addAnnotation(sid, 5, [-1, 0]);
  await api.resume(sid);
  await api.waitForPhase(sid, "finished");
  await api.saveExperiment(sid, "with-arrows");

  const originals = await api.listExperiments();
  assert.deepEqual(
    originals.map((r) => r.name),
    ["plain-labels", "with-arrows"],
  );
  assert.equal(originals[1].accuracy_series.length, 60);

  // wipe the store (not recorded in the log), then replay the log
  const cleanup = new ApiClient(base);
  await cleanup.deleteExperiment("plain-labels");
  await cleanup.deleteExperiment("with-arrows");
  assert.deepEqual(await cleanup.listExperiments(), []);

  await replayLog(base, log);

  const replayed = await cleanup.listExperiments();
  assert.equal(stable(replayed), stable(originals));
});
