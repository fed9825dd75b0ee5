"""Versioned structured-text wire format.

Every payload is a JSON document carrying "format": "steergrad/<kind>"
and "version": 1, with arrays as nested lists. Serialization is
canonical: keys sorted, no whitespace, floats via repr, NaN/Inf
rejected. Canonical bytes round-trip exactly through parse + dump, so
files written by the CLI double as wire fixtures for the service and UI.

Field names, by kind:

* dataset-spec: shape, n_train, n_test, noise (null = shape default), seed
* example: x ([x0, x1]), y
* dataset: spec, train, test
* model-config: hidden_layers, activation, seed, input_dim
* loss-config: steepness, lambda
* session-config: dataset, model, loss, max_epochs, snapshot_every
* loss-breakdown: bce, direction, total, n_examples, n_annotations
* annotation: id, example_index, direction ([dx, dy]), created_at
* history-entry: epoch, losses, train_accuracy, test_accuracy
* grid: x_min, x_max, y_min, y_max, resolution, values (row-major,
  row 0 at y_min)
* annotation-script: steps, each {apply_at_epoch, example_index,
  direction}
* metrics: entries (history entries)
* event: kind, session_id, epoch, payload
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from steergrad.data import Dataset, DatasetSpec, ProbabilityGrid
from steergrad.errors import InputError
from steergrad.losses import DirectionAnnotation, LabeledExample, LossBreakdown, LossConfig
from steergrad.model import ModelConfig
from steergrad.session import HistoryEntry, SessionConfig

WIRE_VERSION = 1


def canonical(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def envelope(kind: str, fields: dict) -> dict:
    return {"format": f"steergrad/{kind}", "version": WIRE_VERSION, **fields}


def check_envelope(payload: dict, kind: str) -> dict:
    want = f"steergrad/{kind}"
    if not isinstance(payload, dict) or payload.get("format") != want:
        raise InputError(f"expected a {want} document")
    if payload.get("version") != WIRE_VERSION:
        raise InputError(f"unsupported {want} version {payload.get('version')!r}")
    return payload


def dataset_spec_to_payload(spec: DatasetSpec) -> dict:
    return {
        "shape": spec.shape,
        "n_train": int(spec.n_train),
        "n_test": int(spec.n_test),
        "noise": None if spec.noise is None else float(spec.noise),
        "seed": int(spec.seed),
    }


def dataset_spec_from_payload(p: dict) -> DatasetSpec:
    return DatasetSpec(
        shape=p["shape"],
        n_train=p["n_train"],
        n_test=p["n_test"],
        noise=p["noise"],
        seed=p["seed"],
    )


def example_to_payload(e: LabeledExample) -> dict:
    return {"x": [float(e.x[0]), float(e.x[1])], "y": int(e.y)}


def example_from_payload(p: dict) -> LabeledExample:
    return LabeledExample(x=(p["x"][0], p["x"][1]), y=p["y"])


def dataset_to_payload(ds: Dataset) -> dict:
    return envelope(
        "dataset",
        {
            "spec": dataset_spec_to_payload(ds.spec),
            "train": [example_to_payload(e) for e in ds.train],
            "test": [example_to_payload(e) for e in ds.test],
        },
    )


def dataset_from_payload(p: dict) -> Dataset:
    p = check_envelope(p, "dataset")
    return Dataset(
        train=tuple(example_from_payload(e) for e in p["train"]),
        test=tuple(example_from_payload(e) for e in p["test"]),
        spec=dataset_spec_from_payload(p["spec"]),
    )


def model_config_to_payload(cfg: ModelConfig) -> dict:
    return {
        "hidden_layers": [int(w) for w in cfg.hidden_layers],
        "activation": cfg.activation,
        "seed": int(cfg.seed),
        "input_dim": int(cfg.input_dim),
    }


def model_config_from_payload(p: dict) -> ModelConfig:
    return ModelConfig(
        hidden_layers=tuple(p["hidden_layers"]),
        activation=p.get("activation", "tanh"),
        seed=p["seed"],
        input_dim=p.get("input_dim", 2),
    )


def loss_config_to_payload(cfg: LossConfig) -> dict:
    return {"steepness": float(cfg.steepness), "lambda": float(cfg.lam)}


def loss_config_from_payload(p: dict) -> LossConfig:
    return LossConfig(steepness=p["steepness"], lam=p["lambda"])


def session_config_to_payload(cfg: SessionConfig) -> dict:
    return {
        "dataset": dataset_spec_to_payload(cfg.dataset),
        "model": model_config_to_payload(cfg.model),
        "loss": loss_config_to_payload(cfg.loss),
        "max_epochs": int(cfg.max_epochs),
        "snapshot_every": int(cfg.snapshot_every),
    }


def session_config_from_payload(p: dict) -> SessionConfig:
    return SessionConfig(
        dataset=dataset_spec_from_payload(p["dataset"]),
        model=model_config_from_payload(p["model"]),
        loss=loss_config_from_payload(p["loss"]),
        max_epochs=p.get("max_epochs", 2000),
        snapshot_every=p.get("snapshot_every", 10),
    )


def breakdown_to_payload(b: LossBreakdown) -> dict:
    return {
        "bce": float(b.bce),
        "direction": float(b.direction),
        "total": float(b.total),
        "n_examples": int(b.n_examples),
        "n_annotations": int(b.n_annotations),
    }


def breakdown_from_payload(p: dict) -> LossBreakdown:
    return LossBreakdown(
        bce=p["bce"],
        direction=p["direction"],
        total=p["total"],
        n_examples=p["n_examples"],
        n_annotations=p["n_annotations"],
    )


def annotation_to_payload(a: DirectionAnnotation) -> dict:
    return {
        "id": int(a.id),
        "example_index": int(a.example_index),
        "direction": [float(a.d[0]), float(a.d[1])],
        "created_at": int(a.created_at),
    }


def annotation_from_payload(p: dict) -> DirectionAnnotation:
    return DirectionAnnotation(
        id=p["id"],
        example_index=p["example_index"],
        d=(p["direction"][0], p["direction"][1]),
        created_at=p["created_at"],
    )


def history_entry_to_payload(e: HistoryEntry) -> dict:
    return {
        "epoch": int(e.epoch),
        "losses": breakdown_to_payload(e.losses),
        "train_accuracy": float(e.train_accuracy),
        "test_accuracy": float(e.test_accuracy),
    }


def history_entry_from_payload(p: dict) -> HistoryEntry:
    return HistoryEntry(
        epoch=p["epoch"],
        losses=breakdown_from_payload(p["losses"]),
        train_accuracy=p["train_accuracy"],
        test_accuracy=p["test_accuracy"],
    )


def grid_to_payload(g: ProbabilityGrid) -> dict:
    return envelope(
        "grid",
        {
            "x_min": float(g.x_min),
            "x_max": float(g.x_max),
            "y_min": float(g.y_min),
            "y_max": float(g.y_max),
            "resolution": int(g.resolution),
            "values": g.values.tolist(),
        },
    )


def grid_from_payload(p: dict) -> ProbabilityGrid:
    p = check_envelope(p, "grid")
    return ProbabilityGrid(
        x_min=p["x_min"],
        x_max=p["x_max"],
        y_min=p["y_min"],
        y_max=p["y_max"],
        resolution=p["resolution"],
        values=np.asarray(p["values"], dtype=np.float64),
    )


def metrics_to_payload(history) -> dict:
    return envelope("metrics", {"entries": [history_entry_to_payload(e) for e in history]})


def metrics_from_payload(p: dict) -> tuple[HistoryEntry, ...]:
    p = check_envelope(p, "metrics")
    return tuple(history_entry_from_payload(e) for e in p["entries"])


def script_to_payload(steps: list[tuple[int, int, tuple[float, float]]]) -> dict:
    return envelope(
        "annotation-script",
        {
            "steps": [
                {
                    "apply_at_epoch": int(epoch),
                    "example_index": int(index),
                    "direction": [float(d[0]), float(d[1])],
                }
                for epoch, index, d in steps
            ]
        },
    )


def script_from_payload(p: dict) -> list[tuple[int, int, tuple[float, float]]]:
    p = check_envelope(p, "annotation-script")
    steps = []
    last_epoch = 0
    for i, step in enumerate(p["steps"]):
        try:
            epoch = int(step["apply_at_epoch"])
            index = int(step["example_index"])
            d = (float(step["direction"][0]), float(step["direction"][1]))
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise InputError(f"annotation script step {i}: {exc}") from exc
        if epoch < last_epoch:
            raise InputError(f"annotation script step {i}: epochs must be nondecreasing")
        last_epoch = epoch
        steps.append((epoch, index, d))
    return steps
