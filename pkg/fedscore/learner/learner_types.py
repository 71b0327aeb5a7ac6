from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Mapping

import numpy as np

from fedscore.errors import InvalidArch

if TYPE_CHECKING:
    from fedscore.learner.model import Model


class Activation(str, Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"
    # softmax over the units of one hidden layer
    SOFTMAX = "softmax"


@dataclass(frozen=True)
class LayerSpec:
    units: int
    activation: Activation = Activation.RELU

    def describe(self) -> str:
        return f"{self.activation.value}({self.units})"


@dataclass(frozen=True)
class ArchSpec:
    hidden_layers: tuple[LayerSpec, ...] = ()
    kind: str = "mlp"

    def validate(self) -> None:
        if self.kind != "mlp":
            raise InvalidArch(f"unsupported learner kind {self.kind!r}")
        for k, layer in enumerate(self.hidden_layers):
            if not isinstance(layer.units, int) or layer.units < 1:
                raise InvalidArch(f"hidden layer {k}: units must be >= 1, got {layer.units!r}")
            if not isinstance(layer.activation, Activation):
                raise InvalidArch(f"hidden layer {k}: unknown activation {layer.activation!r}")

    def describe(self) -> str:
        if not self.hidden_layers:
            return "softmax-regression"
        return "-".join(layer.describe() for layer in self.hidden_layers)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ArchSpec:
        try:
            layers = tuple(
                LayerSpec(units=int(entry["units"]), activation=Activation(entry.get("activation", "relu")))
                for entry in data.get("hidden_layers", [])
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidArch(f"malformed architecture: {exc}") from exc
        arch = cls(hidden_layers=layers, kind=data.get("kind", "mlp"))
        arch.validate()
        return arch

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "hidden_layers": [{"units": l.units, "activation": l.activation.value} for l in self.hidden_layers],
        }


@dataclass(frozen=True)
class AdamConfig:
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


@dataclass(frozen=True)
class EarlyStopConfig:
    patience: int = 1
    min_delta: float = 1e-4


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    max_epochs: int = 5
    batch_size: int = 32
    early_stop: EarlyStopConfig = field(default_factory=EarlyStopConfig)
    adam: AdamConfig = field(default_factory=AdamConfig)

    def __post_init__(self) -> None:
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not (0 < self.adam.beta1 < 1 and 0 < self.adam.beta2 < 1):
            raise ValueError("adam betas must lie in (0, 1)")
        if not self.adam.epsilon > 0:
            raise ValueError("adam epsilon must be > 0")
        if self.early_stop.patience < 1:
            raise ValueError("early_stop.patience must be >= 1")
        if self.early_stop.min_delta < 0:
            raise ValueError("early_stop.min_delta must be >= 0")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> TrainConfig:
        early = data.get("early_stop", {})
        adam = data.get("adam", {})
        defaults = cls()
        return cls(
            learning_rate=float(data.get("learning_rate", defaults.learning_rate)),
            max_epochs=int(data.get("max_epochs", defaults.max_epochs)),
            batch_size=int(data.get("batch_size", defaults.batch_size)),
            early_stop=EarlyStopConfig(
                patience=int(early.get("patience", defaults.early_stop.patience)),
                min_delta=float(early.get("min_delta", defaults.early_stop.min_delta)),
            ),
            adam=AdamConfig(
                beta1=float(adam.get("beta1", defaults.adam.beta1)),
                beta2=float(adam.get("beta2", defaults.adam.beta2)),
                epsilon=float(adam.get("epsilon", defaults.adam.epsilon)),
            ),
        )


@dataclass(frozen=True, eq=False)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def fresh(cls, n_params: int) -> AdamState:
        return cls(np.zeros(n_params), np.zeros(n_params), 0)


@dataclass(frozen=True, eq=False)
class TrainResult:
    model: Model
    epochs_run: int
    epoch_losses: tuple[float, ...]
    seconds: float = 0.0

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1]
