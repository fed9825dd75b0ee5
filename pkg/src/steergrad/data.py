"""Synthetic 2-D datasets, accuracy, and the probability grid.

Three generator shapes cover the linearly separable and curved regimes:
two Gaussian blobs, two interleaving half-moons, and two concentric
circles. Train and test splits come from independent RNG substreams of
the same distribution, so generation is a pure function of the spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from steergrad import _kernels
from steergrad._rng import substream
from steergrad.errors import ConfigurationError, InputError
from steergrad.losses import LabeledExample
from steergrad.model import ModelParams

SHAPES = ("blobs", "moons", "circles")
DEFAULT_NOISE = {"blobs": 0.6, "moons": 0.15, "circles": 0.1}
GRID_MARGIN = 0.15
DEFAULT_RESOLUTION = 100

BLOB_CENTERS = ((-2.0, 0.0), (2.0, 0.0))
CIRCLE_RADII = (1.0, 2.0)


@dataclass(frozen=True)
class DatasetSpec:
    shape: str = "blobs"
    n_train: int = 9
    n_test: int = 200
    noise: float | None = None  # None = shape default
    seed: int = 0

    def validate(self) -> None:
        if self.shape not in SHAPES:
            raise ConfigurationError("shape", f"must be one of {SHAPES}, got {self.shape!r}")
        if self.n_train < 2:
            raise ConfigurationError("n_train", "need at least 2 (one per class)")
        if self.n_test < 0:
            raise ConfigurationError("n_test", "must be >= 0")
        if self.noise is not None and self.noise < 0:
            raise ConfigurationError("noise", "must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError("seed", "must fit in an unsigned 64-bit integer")

    @property
    def effective_noise(self) -> float:
        return DEFAULT_NOISE[self.shape] if self.noise is None else float(self.noise)


@dataclass(frozen=True)
class Dataset:
    train: tuple[LabeledExample, ...]
    test: tuple[LabeledExample, ...]
    spec: DatasetSpec


@dataclass(frozen=True)
class ProbabilityGrid:
    """Lattice of forward() values; row-major with row 0 at y_min."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    resolution: int
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _sample_shape(shape: str, noise: float, n: int, gen: np.random.Generator):
    """Class-0 block then class-1 block; class sizes differ by <= 1."""
    n0 = n - n // 2
    examples = []
    for label, count in ((0, n0), (1, n - n0)):
        for _ in range(count):
            if shape == "blobs":
                cx, cy = BLOB_CENTERS[label]
                g = gen.standard_normal(2)
                x = (cx + noise * g[0], cy + noise * g[1])
            elif shape == "moons":
                t = gen.uniform(0.0, math.pi)
                if label == 0:
                    base = (math.cos(t), math.sin(t))
                else:
                    base = (1.0 - math.cos(t), 0.5 - math.sin(t))
                g = gen.standard_normal(2)
                x = (base[0] + noise * g[0], base[1] + noise * g[1])
            else:  # circles
                t = gen.uniform(0.0, 2.0 * math.pi)
                r = CIRCLE_RADII[label]
                g = gen.standard_normal(2)
                x = (r * math.cos(t) + noise * g[0], r * math.sin(t) + noise * g[1])
            examples.append(LabeledExample(x=x, y=label))
    return tuple(examples)


def generate(spec: DatasetSpec) -> Dataset:
    """Deterministic in the spec; train and test use distinct substreams."""
    spec.validate()
    noise = spec.effective_noise
    train = _sample_shape(spec.shape, noise, spec.n_train, substream(int(spec.seed), "data-train"))
    test = _sample_shape(spec.shape, noise, spec.n_test, substream(int(spec.seed), "data-test"))
    return Dataset(train=train, test=test, spec=spec)


def grid_bounds(dataset: Dataset) -> tuple[float, float, float, float]:
    """Bounding box of all points, expanded by 15% of the range per side."""
    xs = [e.x[0] for e in dataset.train + dataset.test]
    ys = [e.x[1] for e in dataset.train + dataset.test]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    # degenerate extents (e.g. two noiseless points on a line) get unit padding
    pad_x = GRID_MARGIN * (x_max - x_min) if x_max > x_min else 1.0
    pad_y = GRID_MARGIN * (y_max - y_min) if y_max > y_min else 1.0
    return x_min - pad_x, x_max + pad_x, y_min - pad_y, y_max + pad_y


def evaluate_grid(
    params: ModelParams, dataset: Dataset, resolution: int = DEFAULT_RESOLUTION
) -> ProbabilityGrid:
    """forward() at every lattice point of the padded bounding box."""
    if resolution < 2:
        raise InputError(f"resolution must be >= 2, got {resolution}")
    x_min, x_max, y_min, y_max = grid_bounds(dataset)
    xs = np.linspace(x_min, x_max, resolution)
    ys = np.linspace(y_min, y_max, resolution)
    pts = np.empty((resolution * resolution, 2))
    pts[:, 0] = np.tile(xs, resolution)
    pts[:, 1] = np.repeat(ys, resolution)
    values = _kernels.forward_batch(params._sizes_arr, params.flat, pts)
    return ProbabilityGrid(
        x_min=x_min,
        x_max=x_max,
        y_min=y_min,
        y_max=y_max,
        resolution=resolution,
        values=values.reshape(resolution, resolution),
    )


def accuracy(params: ModelParams, examples: list[LabeledExample]) -> float:
    """Fraction of examples whose thresholded probability matches the
    label; a probability of exactly 0.5 predicts class 1."""
    if not examples:
        raise InputError("accuracy needs a nonempty example list")
    pts = np.array([e.x for e in examples], dtype=np.float64)
    probs = _kernels.forward_batch(params._sizes_arr, params.flat, pts)
    labels = np.array([e.y for e in examples])
    return float(np.mean((probs >= 0.5).astype(np.int64) == labels))
