"""On-disk experiment records.

One JSON file per saved experiment plus an index file, all in the wire
format, so saved runs can be compared across sessions and replayed: the
record carries the full session config, the annotation snapshot, and the
RNG/optimizer algorithm identifiers.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from steergrad._rng import RNG_ALGORITHM
from steergrad.errors import ExperimentExistsError, ExperimentNotFoundError, InputError
from steergrad.losses import OPTIMIZER_ALGORITHM, DirectionAnnotation
from steergrad.serialize import (
    annotation_from_payload,
    annotation_to_payload,
    canonical,
    check_envelope,
    envelope,
    session_config_from_payload,
    session_config_to_payload,
)
from steergrad.session import SessionConfig, SessionState

INDEX_FILE = "index.json"


@dataclass(frozen=True)
class ExperimentRecord:
    """Immutable snapshot of one finished or paused run."""

    name: str
    config: SessionConfig
    annotations: tuple[DirectionAnnotation, ...]
    accuracy_series: tuple[float, ...]  # test accuracy per epoch
    final_accuracy: float
    rng_algorithm: str
    optimizer_algorithm: str
    created_at: str  # ISO-8601 UTC


def record_from_state(
    state: SessionState, name: str, created_at: str | None = None
) -> ExperimentRecord:
    if not state.history:
        raise InputError("cannot save an experiment before any epoch has run")
    if not name:
        raise InputError("experiment name must be nonempty")
    series = tuple(float(e.test_accuracy) for e in state.history)
    if created_at is None:
        created_at = datetime.now(timezone.utc).isoformat()
    return ExperimentRecord(
        name=name,
        config=state.config,
        annotations=state.annotations,
        accuracy_series=series,
        final_accuracy=series[-1],
        rng_algorithm=RNG_ALGORITHM,
        optimizer_algorithm=OPTIMIZER_ALGORITHM,
        created_at=created_at,
    )


def record_to_payload(r: ExperimentRecord) -> dict:
    return envelope(
        "experiment",
        {
            "name": r.name,
            "config": session_config_to_payload(r.config),
            "annotations": [annotation_to_payload(a) for a in r.annotations],
            "accuracy_series": [float(v) for v in r.accuracy_series],
            "final_accuracy": float(r.final_accuracy),
            "rng_algorithm": r.rng_algorithm,
            "optimizer_algorithm": r.optimizer_algorithm,
            "created_at": r.created_at,
        },
    )


def record_from_payload(p: dict) -> ExperimentRecord:
    p = check_envelope(p, "experiment")
    return ExperimentRecord(
        name=p["name"],
        config=session_config_from_payload(p["config"]),
        annotations=tuple(annotation_from_payload(a) for a in p["annotations"]),
        accuracy_series=tuple(p["accuracy_series"]),
        final_accuracy=p["final_accuracy"],
        rng_algorithm=p["rng_algorithm"],
        optimizer_algorithm=p["optimizer_algorithm"],
        created_at=p["created_at"],
    )


class ExperimentStore:
    """Named, immutable records in a directory. Names are unique."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._index_path = self.directory / INDEX_FILE
        if self._index_path.exists():
            index = check_envelope(
                json.loads(self._index_path.read_text()), "experiment-index"
            )
            self._index: dict[str, str] = dict(index["experiments"])
        else:
            self._index = {}

    def _write_index(self) -> None:
        payload = envelope("experiment-index", {"experiments": self._index})
        tmp = self._index_path.with_suffix(".tmp")
        tmp.write_text(canonical(payload))
        tmp.replace(self._index_path)

    def save(self, record: ExperimentRecord) -> ExperimentRecord:
        if record.name in self._index:
            raise ExperimentExistsError(f"experiment {record.name!r} already exists")
        slug = re.sub(r"[^A-Za-z0-9_-]+", "-", record.name).strip("-") or "experiment"
        digest = hashlib.sha1(record.name.encode()).hexdigest()[:8]
        filename = f"{slug}-{digest}.json"
        (self.directory / filename).write_text(canonical(record_to_payload(record)))
        self._index[record.name] = filename
        self._write_index()
        return record

    def names(self) -> list[str]:
        return list(self._index)

    def load(self, name: str) -> ExperimentRecord:
        if name not in self._index:
            raise ExperimentNotFoundError(f"no experiment named {name!r}")
        payload = json.loads((self.directory / self._index[name]).read_text())
        return record_from_payload(payload)

    def list(self) -> list[ExperimentRecord]:
        return [self.load(name) for name in self._index]

    def delete(self, name: str) -> None:
        if name not in self._index:
            raise ExperimentNotFoundError(f"no experiment named {name!r}")
        path = self.directory / self._index.pop(name)
        self._write_index()
        if path.exists():
            path.unlink()
