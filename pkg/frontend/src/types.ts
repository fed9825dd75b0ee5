// Wire payloads exchanged with the training service.

export interface DatasetSpec {
  shape: "blobs" | "moons" | "circles";
  n_train: number;
  n_test: number;
  noise: number | null;
  seed: number;
}

export interface SessionConfig {
  dataset: DatasetSpec;
  model: { hidden_layers: number[]; activation: string; seed: number; input_dim: number };
  loss: { steepness: number; lambda: number };
  max_epochs: number;
  snapshot_every: number;
}

export interface LabeledExample {
  x: [number, number];
  y: 0 | 1;
}

export interface DatasetPayload {
  format: string;
  version: number;
  spec: DatasetSpec;
  train: LabeledExample[];
  test: LabeledExample[];
}

export interface Annotation {
  id: number;
  example_index: number;
  direction: [number, number];
  created_at: number;
}

export interface LossBreakdown {
  bce: number;
  direction: number;
  total: number;
  n_examples: number;
  n_annotations: number;
}

export interface HistoryEntry {
  epoch: number;
  losses: LossBreakdown;
  train_accuracy: number;
  test_accuracy: number;
}

export interface GridPayload {
  format: string;
  version: number;
  x_min: number;
  x_max: number;
  y_min: number;
  y_max: number;
  resolution: number;
  values: number[][]; // row-major, row 0 at y_min
}

export interface SessionStatePayload {
  session_id: string;
  phase: Phase;
  epoch: number;
  lambda: number;
  steepness: number;
  fault: string | null;
  config: SessionConfig;
  history: HistoryEntry[];
  annotations: Annotation[];
}

export interface ExperimentRecord {
  format: string;
  version: number;
  name: string;
  config: SessionConfig;
  annotations: Annotation[];
  accuracy_series: number[];
  final_accuracy: number;
  rng_algorithm: string;
  optimizer_algorithm: string;
  created_at: string;
}

export type Phase = "idle" | "running" | "paused" | "finished" | "faulted";

export type EventKind = "epoch_metrics" | "grid_snapshot" | "phase_change" | "fault";

export interface EventMessage {
  format: string;
  version: number;
  kind: EventKind;
  session_id: string;
  epoch: number;
  payload: Record<string, unknown>;
}
