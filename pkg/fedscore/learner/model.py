from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from fedscore.core import Dataset, LabelSpace, ScoreMatrix
from fedscore.errors import InvalidArch, ShapeMismatch
from fedscore.learner.learner_types import Activation, ArchSpec


@dataclass(frozen=True)
class LayerLayout:
    """Where one dense layer's weights and bias live in the flat vector."""

    w_start: int
    fan_in: int
    fan_out: int
    activation: Activation | None  # None marks the softmax output layer

    @property
    def w_stop(self) -> int:
        return self.w_start + self.fan_in * self.fan_out

    @property
    def b_stop(self) -> int:
        return self.w_stop + self.fan_out


def build_layout(arch: ArchSpec, n_features: int, n_outputs: int) -> tuple[LayerLayout, ...]:
    layout: list[LayerLayout] = []
    cursor = 0
    fan_in = n_features
    for layer in arch.hidden_layers:
        layout.append(LayerLayout(cursor, fan_in, layer.units, layer.activation))
        cursor = layout[-1].b_stop
        fan_in = layer.units
    layout.append(LayerLayout(cursor, fan_in, n_outputs, None))
    return tuple(layout)


@dataclass(frozen=True, eq=False)
class Model:
    arch: ArchSpec
    n_features: int
    label_cols: tuple[str, ...]
    label_space: LabelSpace
    parameters: np.ndarray
    layout: tuple[LayerLayout, ...]

    def __post_init__(self) -> None:
        params = np.array(self.parameters, dtype=np.float64, copy=True).reshape(-1)
        if params.size != self.layout[-1].b_stop:
            raise ShapeMismatch(f"{params.size} parameters for a layout of {self.layout[-1].b_stop}")
        params.setflags(write=False)
        object.__setattr__(self, "parameters", params)

    @property
    def parameter_count(self) -> int:
        return int(self.parameters.size)

    @property
    def n_outputs(self) -> int:
        return len(self.label_cols)

    def with_parameters(self, parameters: np.ndarray) -> Model:
        return replace(self, parameters=parameters)

    def label_positions(self, labels: np.ndarray) -> np.ndarray:
        """Map label-space indices to output positions; -1 marks foreign labels."""
        lookup = np.full(len(self.label_space), -1, dtype=np.int64)
        for position, label in enumerate(self.label_cols):
            lookup[self.label_space.index(label)] = position
        return lookup[np.asarray(labels, dtype=np.int64)]


def init_model(arch: ArchSpec, n_features: int, label_cols: Sequence[str], seed: int,
               *, label_space: LabelSpace) -> Model:
    """Glorot-uniform weights, zero biases; deterministic in ``seed``."""
    arch.validate()
    if n_features < 1:
        raise InvalidArch(f"n_features must be >= 1, got {n_features}")
    cols = label_space.ordered(label_cols)
    if not cols:
        raise InvalidArch("a model needs at least one output label")
    layout = build_layout(arch, n_features, len(cols))
    rng = np.random.Generator(np.random.PCG64(seed))
    params = np.zeros(layout[-1].b_stop)
    for layer in layout:
        limit = np.sqrt(6.0 / (layer.fan_in + layer.fan_out))
        params[layer.w_start:layer.w_stop] = rng.uniform(-limit, limit, size=layer.fan_in * layer.fan_out)
    return Model(arch, n_features, cols, label_space, params, layout)


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    match activation:
        case Activation.RELU:
            return np.maximum(z, 0.0)
        case Activation.SIGMOID:
            return 0.5 * (1.0 + np.tanh(0.5 * z))
        case Activation.SOFTMAX:
            return _softmax(z)
    raise InvalidArch(f"unknown activation {activation!r}")


def _activation_backward(z: np.ndarray, a: np.ndarray, da: np.ndarray, activation: Activation) -> np.ndarray:
    match activation:
        case Activation.RELU:
            return da * (z > 0)
        case Activation.SIGMOID:
            return da * a * (1.0 - a)
        case Activation.SOFTMAX:
            return a * (da - np.sum(da * a, axis=1, keepdims=True))
    raise InvalidArch(f"unknown activation {activation!r}")


def _unpack(params: np.ndarray, layer: LayerLayout) -> tuple[np.ndarray, np.ndarray]:
    w = params[layer.w_start:layer.w_stop].reshape(layer.fan_in, layer.fan_out)
    b = params[layer.w_stop:layer.b_stop]
    return w, b


def forward(model: Model, features: np.ndarray, params: np.ndarray | None = None):
    """Return output probabilities and the per-layer cache for backprop."""
    params = model.parameters if params is None else params
    a = features
    cache = []
    for layer in model.layout:
        w, b = _unpack(params, layer)
        z = a @ w + b
        out = _softmax(z) if layer.activation is None else _activate(z, layer.activation)
        cache.append((a, z, out))
        a = out
    return a, cache


def backward(model: Model, params: np.ndarray, cache, positions: np.ndarray) -> np.ndarray:
    """Gradient of the mean cross-entropy w.r.t. the flat parameter vector."""
    grad = np.zeros_like(params)
    n = positions.shape[0]
    probs = cache[-1][2]
    dz = probs.copy()
    dz[np.arange(n), positions] -= 1.0
    dz /= n
    for k in range(len(model.layout) - 1, -1, -1):
        layer = model.layout[k]
        a_prev, _, _ = cache[k]
        w, _ = _unpack(params, layer)
        grad[layer.w_start:layer.w_stop] = (a_prev.T @ dz).reshape(-1)
        grad[layer.w_stop:layer.b_stop] = dz.sum(axis=0)
        if k == 0:
            break
        da = dz @ w.T
        prev = model.layout[k - 1]
        _, z_prev, a_prev_out = cache[k - 1]
        dz = _activation_backward(z_prev, a_prev_out, da, prev.activation)
    return grad


def predict_scores(model: Model, dataset: Dataset) -> ScoreMatrix:
    """Row-stochastic scores of ``model`` over every row of ``dataset``."""
    if dataset.n_features != model.n_features:
        raise ShapeMismatch(f"model expects {model.n_features} features, dataset has {dataset.n_features}")
    probs, _ = forward(model, dataset.features)
    return ScoreMatrix(probs, model.label_cols, model.label_space)
