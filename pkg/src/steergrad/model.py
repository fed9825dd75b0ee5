"""The probability model and its three evaluation modes.

A small dense network maps a 2-D point to the probability of class 1
through tanh hidden layers and a logistic output. Besides the forward
value, the model exposes exact input gradients, directional derivatives
computed by a tangent pass, and parameter gradients of both scalar
evaluations. The parameter gradient of the directional derivative is the
second-order quantity the direction loss needs; it is computed by a
reverse pass over the tangent computation, not approximated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from steergrad import _kernels
from steergrad._rng import substream
from steergrad.errors import ConfigurationError, InputError

PARAMS_FORMAT = "steergrad-params"
PARAMS_VERSION = 1

Point2 = tuple[float, float]


@dataclass(frozen=True)
class ModelConfig:
    """Architecture and initialization seed.

    Hidden activations must be smooth so the input gradient exists
    everywhere and is itself differentiable in the parameters; tanh is
    the only activation offered.
    """

    hidden_layers: tuple[int, ...] = (16, 16)
    activation: str = "tanh"
    seed: int = 0
    input_dim: int = 2

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(w) for w in self.hidden_layers))

    def validate(self) -> None:
        if self.input_dim != 2:
            raise ConfigurationError("input_dim", f"must be 2, got {self.input_dim}")
        for w in self.hidden_layers:
            if w < 1:
                raise ConfigurationError("hidden_layers", f"layer width must be >= 1, got {w}")
        if self.activation != "tanh":
            raise ConfigurationError("activation", f"unknown activation {self.activation!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError("seed", "must fit in an unsigned 64-bit integer")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.input_dim, *self.hidden_layers, 1)


@dataclass(frozen=True)
class ModelParams:
    """Immutable flat parameter vector plus the layer shape.

    Layout is layer-major: for each layer, the weight matrix row-major,
    then the bias vector. Training replaces the whole value; evaluation
    never mutates it, so sharing across threads is safe.
    """

    sizes: tuple[int, ...]
    flat: np.ndarray
    _sizes_arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        flat = np.ascontiguousarray(self.flat, dtype=np.float64)
        if flat.ndim != 1 or flat.shape[0] != n_params(self.sizes):
            raise ConfigurationError(
                "params", f"expected {n_params(self.sizes)} values for sizes {self.sizes}"
            )
        flat.setflags(write=False)
        object.__setattr__(self, "flat", flat)
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "_sizes_arr", np.asarray(self.sizes, dtype=np.int64))

    @classmethod
    def from_layers(cls, layers: list[tuple[np.ndarray, np.ndarray]]) -> "ModelParams":
        """Build from [(weight matrix, bias vector), ...] pairs."""
        sizes = [np.shape(layers[0][0])[1]]
        chunks = []
        for w, b in layers:
            w = np.asarray(w, dtype=np.float64)
            b = np.asarray(b, dtype=np.float64)
            if w.shape[0] != b.shape[0] or w.shape[1] != sizes[-1]:
                raise ConfigurationError("params", "inconsistent layer shapes")
            sizes.append(w.shape[0])
            chunks.append(w.reshape(-1))
            chunks.append(b)
        return cls(tuple(sizes), np.concatenate(chunks))

    def weights(self, layer: int) -> np.ndarray:
        off = _layer_offset(self.sizes, layer)
        nin, nout = self.sizes[layer], self.sizes[layer + 1]
        return self.flat[off : off + nout * nin].reshape(nout, nin)

    def biases(self, layer: int) -> np.ndarray:
        off = _layer_offset(self.sizes, layer)
        nin, nout = self.sizes[layer], self.sizes[layer + 1]
        return self.flat[off + nout * nin : off + nout * nin + nout]

    @property
    def n_layers(self) -> int:
        return len(self.sizes) - 1

    def with_flat(self, flat: np.ndarray) -> "ModelParams":
        return ModelParams(self.sizes, flat)


def n_params(sizes) -> int:
    return sum(sizes[l + 1] * sizes[l] + sizes[l + 1] for l in range(len(sizes) - 1))


def _layer_offset(sizes, layer: int) -> int:
    off = 0
    for l in range(layer):
        off += sizes[l + 1] * sizes[l] + sizes[l + 1]
    return off


def init_params(config: ModelConfig) -> ModelParams:
    """Fan-in scaled zero-mean normal weights, zero biases.

    Deterministic: the same (config, seed) always yields the same values.
    """
    config.validate()
    gen = substream(int(config.seed), "params-init")
    sizes = config.layer_sizes
    chunks = []
    for l in range(len(sizes) - 1):
        nin, nout = sizes[l], sizes[l + 1]
        w = gen.standard_normal(size=(nout, nin)) * (1.0 / math.sqrt(nin))
        chunks.append(w.reshape(-1))
        chunks.append(np.zeros(nout))
    return ModelParams(sizes, np.concatenate(chunks))


def _check_point(x) -> tuple[float, float]:
    x0, x1 = float(x[0]), float(x[1])
    if not (math.isfinite(x0) and math.isfinite(x1)):
        raise InputError(f"non-finite input point ({x0}, {x1})")
    return x0, x1


def unit_direction(d) -> tuple[float, float]:
    """Normalize an annotation vector; zero or non-finite is rejected."""
    d0, d1 = float(d[0]), float(d[1])
    if not (math.isfinite(d0) and math.isfinite(d1)):
        raise InputError(f"non-finite direction ({d0}, {d1})")
    norm = math.hypot(d0, d1)
    if norm == 0.0:
        raise InputError("direction must be nonzero")
    return d0 / norm, d1 / norm


def forward(params: ModelParams, x) -> float:
    """Predicted probability of class 1, strictly inside (0, 1)."""
    x0, x1 = _check_point(x)
    return _kernels.forward_one(params._sizes_arr, params.flat, x0, x1)


def input_gradient(params: ModelParams, x) -> np.ndarray:
    """Exact gradient of forward() in the two input coordinates."""
    x0, x1 = _check_point(x)
    _, g0, g1 = _kernels.input_gradient_one(params._sizes_arr, params.flat, x0, x1)
    return np.array([g0, g1])


def directional_derivative(params: ModelParams, x, d) -> float:
    """d . grad(forward) at x, by a tangent pass seeded with d."""
    x0, x1 = _check_point(x)
    d0, d1 = float(d[0]), float(d[1])
    if not (math.isfinite(d0) and math.isfinite(d1)):
        raise InputError(f"non-finite direction ({d0}, {d1})")
    _, jvp = _kernels.jvp_one(params._sizes_arr, params.flat, x0, x1, d0, d1)
    return jvp


def param_gradient_of_forward(params: ModelParams, x) -> np.ndarray:
    """Exact gradient of forward(params, x) in every parameter, flat."""
    x0, x1 = _check_point(x)
    _, grad = _kernels.forward_param_grad_one(params._sizes_arr, params.flat, x0, x1)
    return grad


def param_gradient_of_directional_derivative(params: ModelParams, x, d) -> np.ndarray:
    """Exact gradient of directional_derivative(params, x, d) in every
    parameter: a reverse pass over the tangent computation."""
    x0, x1 = _check_point(x)
    d0, d1 = float(d[0]), float(d[1])
    _, _, grad = _kernels.jvp_param_grad_one(params._sizes_arr, params.flat, x0, x1, d0, d1)
    return grad


def params_to_text(params: ModelParams) -> str:
    """Serialize to the versioned plain-text format.

    Line 1: "steergrad-params 1". Line 2: "sizes n0 n1 ... nL". Then per
    layer: "layer <idx> <out> <in>", <out> weight rows, one "b ..." bias
    line. Values use repr(), which round-trips doubles exactly.
    """
    lines = [f"{PARAMS_FORMAT} {PARAMS_VERSION}", "sizes " + " ".join(str(s) for s in params.sizes)]
    for l in range(params.n_layers):
        w = params.weights(l)
        b = params.biases(l)
        lines.append(f"layer {l} {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(repr(v) for v in row.tolist()))
        lines.append("b " + " ".join(repr(v) for v in b.tolist()))
    return "\n".join(lines) + "\n"


def params_from_text(text: str) -> ModelParams:
    lines = text.splitlines()
    if not lines or lines[0].split() != [PARAMS_FORMAT, str(PARAMS_VERSION)]:
        raise InputError("not a steergrad-params v1 document")
    head = lines[1].split()
    if head[0] != "sizes":
        raise InputError("missing sizes line")
    sizes = tuple(int(s) for s in head[1:])
    values = []
    i = 2
    for l in range(len(sizes) - 1):
        nin, nout = sizes[l], sizes[l + 1]
        if lines[i].split()[:2] != ["layer", str(l)]:
            raise InputError(f"expected layer {l} at line {i + 1}")
        i += 1
        for _ in range(nout):
            row = [float(v) for v in lines[i].split()]
            if len(row) != nin:
                raise InputError(f"bad row width at line {i + 1}")
            values.extend(row)
            i += 1
        bias = lines[i].split()
        if bias[0] != "b" or len(bias) != nout + 1:
            raise InputError(f"bad bias line at line {i + 1}")
        values.extend(float(v) for v in bias[1:])
        i += 1
    return ModelParams(sizes, np.asarray(values))
