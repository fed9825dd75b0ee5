"""Interactive training state machine.

A session owns the model, optimizer and annotation store, and advances by
whole epochs: one full-batch objective evaluation plus one optimizer
step. Commands (start, pause, resume, reset, annotation edits, weight
changes) only ever apply between epochs, which makes a run a pure
function of (config, timed command list) and therefore exactly
replayable. All state values are immutable; every transition returns a
new state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from steergrad.data import Dataset, DatasetSpec, accuracy, generate
from steergrad.errors import (
    AnnotationError,
    ConfigurationError,
    InputError,
    TrainingFault,
    TransitionError,
)
from steergrad.losses import (
    AdamState,
    DirectionAnnotation,
    LossBreakdown,
    LossConfig,
    init_optimizer,
    optimizer_step,
    total_objective,
)
from steergrad.model import ModelConfig, ModelParams, init_params, unit_direction


class Phase(str, Enum):
    IDLE = "idle"
    RUNNING = "running"
    PAUSED = "paused"
    FINISHED = "finished"
    FAULTED = "faulted"


@dataclass(frozen=True)
class SessionConfig:
    dataset: DatasetSpec
    model: ModelConfig
    loss: LossConfig
    max_epochs: int = 2000
    snapshot_every: int = 10  # epochs between grid events

    def validate(self) -> None:
        self.dataset.validate()
        self.model.validate()
        self.loss.validate()
        if self.max_epochs < 1:
            raise ConfigurationError("max_epochs", "must be >= 1")
        if self.snapshot_every < 1:
            raise ConfigurationError("snapshot_every", "must be >= 1")
        if self.dataset.n_test < 1:
            raise ConfigurationError("n_test", "sessions record test accuracy every epoch")


# Commands; applied only at epoch boundaries.
@dataclass(frozen=True)
class Start:
    pass


@dataclass(frozen=True)
class Pause:
    pass


@dataclass(frozen=True)
class Resume:
    pass


@dataclass(frozen=True)
class Reset:
    pass


@dataclass(frozen=True)
class SetLambda:
    value: float


@dataclass(frozen=True)
class AddAnnotation:
    example_index: int
    direction: tuple[float, float]


@dataclass(frozen=True)
class RemoveAnnotation:
    annotation_id: int


Command = Start | Pause | Resume | Reset | SetLambda | AddAnnotation | RemoveAnnotation


@dataclass(frozen=True)
class HistoryEntry:
    epoch: int
    losses: LossBreakdown
    train_accuracy: float
    test_accuracy: float


@dataclass(frozen=True)
class SessionState:
    config: SessionConfig
    dataset: Dataset
    phase: Phase
    epoch: int
    params: ModelParams
    opt_state: AdamState
    loss: LossConfig  # current values; SetLambda replaces it
    annotations: tuple[DirectionAnnotation, ...]
    history: tuple[HistoryEntry, ...]
    annotation_seq: int = 0
    fault: str | None = None


def create_session(config: SessionConfig) -> SessionState:
    config.validate()
    params = init_params(config.model)
    return SessionState(
        config=config,
        dataset=generate(config.dataset),
        phase=Phase.IDLE,
        epoch=0,
        params=params,
        opt_state=init_optimizer(params.flat.shape[0]),
        loss=config.loss,
        annotations=(),
        history=(),
    )


_TRANSITIONS = {
    # command type -> {allowed phase: next phase}
    Start: {Phase.IDLE: Phase.RUNNING},
    Pause: {Phase.RUNNING: Phase.PAUSED},
    Resume: {Phase.PAUSED: Phase.RUNNING},
    Reset: {Phase.PAUSED: Phase.IDLE, Phase.FINISHED: Phase.IDLE},
}

# Annotation edits are legal whenever training is stopped, and between
# epochs while it runs (the service queue guarantees the boundary).
_ANNOTATION_PHASES = (Phase.IDLE, Phase.PAUSED, Phase.RUNNING)


def command(state: SessionState, cmd: Command) -> SessionState:
    """Apply one command at an epoch boundary; illegal transitions raise
    TransitionError and leave the state unchanged."""
    kind = type(cmd)
    if kind in _TRANSITIONS:
        allowed = _TRANSITIONS[kind]
        if state.phase not in allowed:
            raise TransitionError(kind.__name__.lower(), state.phase.value)
        if kind is Reset:
            # fresh learning state, same dataset; annotations are kept so
            # reruns compare training over an unchanged annotation set
            params = init_params(state.config.model)
            return replace(
                state,
                phase=Phase.IDLE,
                epoch=0,
                params=params,
                opt_state=init_optimizer(params.flat.shape[0]),
                history=(),
                fault=None,
            )
        return replace(state, phase=allowed[state.phase])
    if kind is SetLambda:
        value = float(cmd.value)
        if not (math.isfinite(value) and value >= 0.0):
            raise InputError(f"lambda must be finite and >= 0, got {cmd.value}")
        return replace(state, loss=replace(state.loss, lam=value))
    if kind is AddAnnotation:
        if state.phase not in _ANNOTATION_PHASES:
            raise TransitionError("annotate", state.phase.value)
        if not 0 <= cmd.example_index < len(state.dataset.train):
            raise AnnotationError(
                f"example_index {cmd.example_index} is outside the training set "
                f"(size {len(state.dataset.train)})"
            )
        try:
            d = unit_direction(cmd.direction)
        except InputError as exc:
            raise AnnotationError(str(exc)) from exc
        ann = DirectionAnnotation(
            id=state.annotation_seq,
            example_index=cmd.example_index,
            d=d,
            created_at=state.annotation_seq,
        )
        return replace(
            state,
            annotations=state.annotations + (ann,),
            annotation_seq=state.annotation_seq + 1,
        )
    if kind is RemoveAnnotation:
        if state.phase not in _ANNOTATION_PHASES:
            raise TransitionError("annotate", state.phase.value)
        kept = tuple(a for a in state.annotations if a.id != cmd.annotation_id)
        if len(kept) == len(state.annotations):
            raise KeyError(f"no annotation with id {cmd.annotation_id}")
        return replace(state, annotations=kept)
    raise TypeError(f"unknown command {cmd!r}")


def train_epoch(state: SessionState) -> SessionState:
    """One full-batch step. Appends a history entry with the loss that
    produced the gradient and the accuracies of the updated model."""
    if state.phase is not Phase.RUNNING:
        raise TransitionError("train", state.phase.value)
    train = list(state.dataset.train)
    try:
        breakdown, grad = total_objective(state.params, train, list(state.annotations), state.loss)
        if not math.isfinite(breakdown.total):
            raise TrainingFault(f"non-finite loss at epoch {state.epoch + 1}")
        params, opt_state = optimizer_step(state.params, grad, state.opt_state)
    except TrainingFault as fault:
        return replace(state, phase=Phase.FAULTED, fault=str(fault))
    epoch = state.epoch + 1
    entry = HistoryEntry(
        epoch=epoch,
        losses=breakdown,
        train_accuracy=accuracy(params, train),
        test_accuracy=accuracy(params, list(state.dataset.test)),
    )
    return replace(
        state,
        phase=Phase.FINISHED if epoch >= state.config.max_epochs else Phase.RUNNING,
        epoch=epoch,
        params=params,
        opt_state=opt_state,
        history=state.history + (entry,),
    )


def replay(config: SessionConfig, timed_commands: list[tuple[int, Command]]) -> SessionState:
    """Run a session headlessly from a list of (epoch boundary, command).

    While running, a command applies at the boundary where the epoch
    counter first reaches its tag; while stopped, pending commands apply
    immediately (a paused clock does not advance). Tags must be
    nondecreasing. This is the engine behind the CLI and the scripted
    acceptance runs, so interactive and headless sessions cannot drift.
    """
    epochs = [e for e, _ in timed_commands]
    if any(b < a for a, b in zip(epochs, epochs[1:])):
        raise InputError("command epochs must be nondecreasing")
    state = create_session(config)
    i = 0
    while True:
        if state.phase is Phase.FAULTED:
            break
        if state.phase is Phase.RUNNING:
            while (
                i < len(timed_commands)
                and timed_commands[i][0] <= state.epoch
                and state.phase is Phase.RUNNING
            ):
                state = command(state, timed_commands[i][1])
                i += 1
            if state.phase is Phase.RUNNING:
                state = train_epoch(state)
            continue
        if i < len(timed_commands):
            state = command(state, timed_commands[i][1])
            i += 1
            continue
        break
    return state
