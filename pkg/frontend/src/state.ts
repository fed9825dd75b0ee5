// View state: the single mutable store behind the panels. Event-stream
// messages are applied in arrival order; metric series are append-only.

import type {
  Annotation,
  DatasetPayload,
  EventMessage,
  ExperimentRecord,
  GridPayload,
  HistoryEntry,
  Phase,
  SessionStatePayload,
} from "./types.js";

export interface SeriesPoint {
  epoch: number;
  accuracy: number;
}

export interface ViewState {
  sessionId: string | null;
  phase: Phase;
  epoch: number;
  lambda: number;
  fault: string | null;
  dataset: DatasetPayload | null;
  grid: GridPayload | null;
  current: SeriesPoint[]; // live test-accuracy series
  lastLosses: HistoryEntry["losses"] | null;
  annotations: Annotation[];
  experiments: ExperimentRecord[];
  visibleExperiments: Set<string>;
  draft: { originIndex: number; vector: [number, number] } | null;
  selectedIndex: number | null;
  streamConnected: boolean;
  notice: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    phase: "idle",
    epoch: 0,
    lambda: 1.0,
    fault: null,
    dataset: null,
    grid: null,
    current: [],
    lastLosses: null,
    annotations: [],
    experiments: [],
    visibleExperiments: new Set(),
    draft: null,
    selectedIndex: null,
    streamConnected: false,
    notice: null,
  };
}

export function applyEvent(state: ViewState, event: EventMessage): void {
  if (event.session_id !== state.sessionId) return;
  switch (event.kind) {
    case "epoch_metrics": {
      if (event.epoch > state.epoch || state.current.length === 0) {
        state.epoch = event.epoch;
        state.current.push({
          epoch: event.epoch,
          accuracy: event.payload.test_accuracy as number,
        });
        state.lastLosses = event.payload.losses as HistoryEntry["losses"];
      }
      break;
    }
    case "grid_snapshot":
      state.grid = event.payload as unknown as GridPayload;
      break;
    case "phase_change":
      state.phase = event.payload.phase as Phase;
      break;
    case "fault":
      state.phase = "faulted";
      state.fault = event.payload.diagnostic as string;
      break;
  }
}

/** Merge a state fetch (pagination from the last seen epoch) after a
 * stream reconnect; never duplicates an epoch already charted. */
export function applyStateFetch(state: ViewState, payload: SessionStatePayload): void {
  state.phase = payload.phase;
  state.lambda = payload.lambda;
  state.fault = payload.fault;
  state.annotations = payload.annotations;
  for (const entry of payload.history) {
    if (entry.epoch > state.epoch || state.current.length === 0) {
      state.epoch = entry.epoch;
      state.current.push({ epoch: entry.epoch, accuracy: entry.test_accuracy });
      state.lastLosses = entry.losses;
    }
  }
  if (payload.epoch > state.epoch) state.epoch = payload.epoch;
}

export function lastChartedEpoch(state: ViewState): number {
  return state.current.length ? state.current[state.current.length - 1].epoch : 0;
}
