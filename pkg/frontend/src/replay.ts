// Headless replay of a recorded call log: the proof that the UI holds
// no privileged channel. Session ids are remapped as the replayed
// create-session calls mint new ones; epoch-tagged calls resolve at
// their boundary so they must not serialize the sequence; wait_phase
// barriers poll exactly like the original session did.

import type { CallLogEntry } from "./api.js";
import type { Phase } from "./types.js";

async function rawRequest(base: string, method: string, path: string, body?: unknown) {
  const response = await fetch(base + path, {
    method,
    headers: body === undefined ? undefined : { "content-type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const text = await response.text();
  const payload = text ? JSON.parse(text) : {};
  if (!response.ok) {
    throw new Error(`${method} ${path} -> ${response.status}: ${payload.error}`);
  }
  return payload;
}

const SESSION_PATH = /\/api\/sessions\/([a-z0-9]+)/;

/** Original session ids in order of first appearance; the k-th created
 * session in the log is the k-th id used by later calls. */
export function loggedSessionIds(log: CallLogEntry[]): string[] {
  const ids: string[] = [];
  for (const entry of log) {
    const source = entry.kind === "wait_phase" ? entry.session_path : entry.path;
    const match = source?.match(SESSION_PATH);
    if (match && !ids.includes(match[1])) ids.push(match[1]);
  }
  return ids;
}

export async function replayLog(base: string, log: CallLogEntry[]): Promise<void> {
  const originals = loggedSessionIds(log);
  const sessionMap = new Map<string, string>();
  let created = 0;
  const deferred: Promise<unknown>[] = [];
  const remap = (path: string) =>
    path.replace(SESSION_PATH, (match, sid) =>
      sessionMap.has(sid) ? `/api/sessions/${sessionMap.get(sid)}` : match,
    );

  for (const entry of log) {
    if (entry.kind === "wait_phase") {
      const path = remap(entry.session_path!);
      const deadline = Date.now() + 60_000;
      for (;;) {
        const state = await rawRequest(base, "GET", `${path}/state?from_epoch=1000000`);
        if ((state.phase as Phase) === entry.phase) break;
        if (Date.now() > deadline) throw new Error(`replay: timed out waiting for ${entry.phase}`);
        await new Promise((resolve) => setTimeout(resolve, 25));
      }
      // a barrier also guarantees any earlier deferred call has applied
      await Promise.all(deferred.splice(0));
      continue;
    }
    if (entry.method === "POST" && entry.path === "/api/sessions") {
      const out = await rawRequest(base, "POST", entry.path, entry.body);
      if (created < originals.length) {
        sessionMap.set(originals[created], out.session_id as string);
      }
      created += 1;
      continue;
    }
    const path = remap(entry.path!);
    if (entry.deferred) {
      deferred.push(rawRequest(base, entry.method!, path, entry.body));
    } else {
      await rawRequest(base, entry.method!, path, entry.body);
    }
  }
  await Promise.all(deferred);
}
