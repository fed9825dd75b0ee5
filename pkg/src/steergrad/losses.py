"""Training objective: cross-entropy baseline plus the direction loss.

The direction loss averages |(2y - 1) * tanh(steepness * jvp) + 1| over
annotated (example, direction) pairs, where jvp is the directional
derivative of the class-1 probability along the annotated direction. The
term saturates to 0 when the probability of the example's own class
decreases along the arrow (agreement) and to 2 when it increases
(disagreement); an orthogonal direction scores exactly 1. Every
(example, direction) pair counts as one term, so an example with three
arrows contributes three terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from steergrad import _kernels
from steergrad.errors import InputError, TrainingFault
from steergrad.model import ModelParams, Point2

DEFAULT_STEEPNESS = 20.0
DEFAULT_LAMBDA = 1.0

ADAM_STEP_SIZE = 0.01
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
OPTIMIZER_ALGORITHM = (
    f"adam(step_size={ADAM_STEP_SIZE},beta1={ADAM_BETA1},beta2={ADAM_BETA2},eps={ADAM_EPS})"
)


@dataclass(frozen=True)
class LabeledExample:
    x: Point2
    y: int

    def __post_init__(self):
        if self.y not in (0, 1):
            raise InputError(f"label must be 0 or 1, got {self.y!r}")
        object.__setattr__(self, "x", (float(self.x[0]), float(self.x[1])))


@dataclass(frozen=True)
class DirectionAnnotation:
    """One counterfactual direction attached to one training example.

    The direction is stored unit-normalized; admission (and the zero
    vector check) happens in the session layer.
    """

    id: int
    example_index: int
    d: Point2
    created_at: int  # monotonic admission sequence number


@dataclass(frozen=True)
class LossConfig:
    steepness: float = DEFAULT_STEEPNESS  # sign-approximation sharpness
    lam: float = DEFAULT_LAMBDA  # weight of the direction loss

    def validate(self) -> None:
        if not self.steepness > 0:
            raise InputError(f"steepness must be positive, got {self.steepness}")
        if not self.lam >= 0:
            raise InputError(f"lambda must be >= 0, got {self.lam}")


@dataclass(frozen=True)
class LossBreakdown:
    bce: float
    direction: float
    total: float
    n_examples: int
    n_annotations: int


def soft_sign(z: float, steepness: float = DEFAULT_STEEPNESS) -> float:
    """Smooth stand-in for sign(z): tanh(steepness * z), odd, in (-1, 1)."""
    return math.tanh(steepness * z)


def _example_arrays(batch: list[LabeledExample]) -> tuple[np.ndarray, np.ndarray]:
    pts = np.array([e.x for e in batch], dtype=np.float64).reshape(len(batch), 2)
    ys = np.array([float(e.y) for e in batch], dtype=np.float64)
    return pts, ys


def bce_loss(params: ModelParams, batch: list[LabeledExample]) -> tuple[float, np.ndarray]:
    """Mean binary cross entropy over the batch, with exact gradient."""
    if not batch:
        raise InputError("cross entropy needs a nonempty batch")
    pts, ys = _example_arrays(batch)
    return _kernels.bce_loss_grad(params._sizes_arr, params.flat, pts, ys)


def direction_loss(
    params: ModelParams,
    train: list[LabeledExample],
    annotations: list[DirectionAnnotation],
    cfg: LossConfig,
) -> tuple[float, np.ndarray]:
    """Mean annotation term in [0, 2], with exact parameter gradient.

    Zero annotations yield value 0 and a zero gradient.
    """
    cfg.validate()
    if not annotations:
        return 0.0, np.zeros(params.flat.shape[0])
    for a in annotations:
        if not 0 <= a.example_index < len(train):
            raise IndexError(
                f"annotation {a.id} points at example {a.example_index}, "
                f"but the training set has {len(train)} examples"
            )
    pts = np.array([train[a.example_index].x for a in annotations], dtype=np.float64)
    ys = np.array([float(train[a.example_index].y) for a in annotations], dtype=np.float64)
    dirs = np.array([a.d for a in annotations], dtype=np.float64)
    return _kernels.direction_loss_grad(
        params._sizes_arr, params.flat, pts, ys, dirs, float(cfg.steepness)
    )


def total_objective(
    params: ModelParams,
    train: list[LabeledExample],
    annotations: list[DirectionAnnotation],
    cfg: LossConfig,
) -> tuple[LossBreakdown, np.ndarray]:
    """bce + lambda * direction, with the matching gradient.

    With lambda = 0 or no annotations the returned gradient is exactly
    the cross-entropy gradient, bit for bit, so annotated and control
    runs share trajectories when the direction loss is switched off.
    """
    bce, grad = bce_loss(params, train)
    if annotations:
        direction, dgrad = direction_loss(params, train, annotations, cfg)
        if cfg.lam != 0.0:
            grad = grad + cfg.lam * dgrad
    else:
        direction = 0.0
    total = bce + cfg.lam * direction
    breakdown = LossBreakdown(
        bce=bce,
        direction=direction,
        total=total,
        n_examples=len(train),
        n_annotations=len(annotations),
    )
    return breakdown, grad


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int


def init_optimizer(n: int) -> AdamState:
    return AdamState(m=np.zeros(n), v=np.zeros(n), t=0)


def optimizer_step(
    params: ModelParams,
    gradient: np.ndarray,
    state: AdamState,
    step_size: float = ADAM_STEP_SIZE,
) -> tuple[ModelParams, AdamState]:
    """One bias-corrected adaptive-moment update; deterministic."""
    if not np.all(np.isfinite(gradient)):
        raise TrainingFault("non-finite gradient")
    t = state.t + 1
    m = ADAM_BETA1 * state.m + (1.0 - ADAM_BETA1) * gradient
    v = ADAM_BETA2 * state.v + (1.0 - ADAM_BETA2) * (gradient * gradient)
    m_hat = m / (1.0 - ADAM_BETA1**t)
    v_hat = v / (1.0 - ADAM_BETA2**t)
    flat = params.flat - step_size * (m_hat / (np.sqrt(v_hat) + ADAM_EPS))
    if not np.all(np.isfinite(flat)):
        raise TrainingFault("non-finite parameters after update")
    return params.with_flat(flat), AdamState(m=m, v=v, t=t)
