from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from fedscore.core import Dataset, LabelSpace
from fedscore.errors import InvalidSpec, UnknownLabel


@dataclass(frozen=True, eq=False)
class LabelDistribution:
    """Diagonal Gaussian a label's synthetic rows are drawn from."""

    mean: np.ndarray
    std: np.ndarray
    pool_size: int


@dataclass(frozen=True, eq=False)
class SyntheticSpec:
    n_features: int
    labels: Mapping[str, LabelDistribution]

    def validate(self, label_space: LabelSpace | None = None) -> None:
        if self.n_features < 1:
            raise InvalidSpec(f"n_features must be >= 1, got {self.n_features}")
        if not self.labels:
            raise InvalidSpec("synthetic spec declares no labels")
        for label, dist in self.labels.items():
            if dist.mean.shape != (self.n_features,) or dist.std.shape != (self.n_features,):
                raise InvalidSpec(f"{label}: mean/std must have length {self.n_features}")
            if dist.pool_size < 1:
                raise InvalidSpec(f"{label}: pool_size must be >= 1, got {dist.pool_size}")
            if not np.all(dist.std > 0):
                raise InvalidSpec(f"{label}: standard deviations must be > 0")
            if not (np.all(np.isfinite(dist.mean)) and np.all(np.isfinite(dist.std))):
                raise InvalidSpec(f"{label}: mean/std must be finite")
        if label_space is not None:
            declared = set(self.labels)
            missing = [label for label in label_space.labels if label not in declared]
            if missing:
                raise InvalidSpec(f"no distribution for labels {missing}")
            for label in declared:
                if label not in label_space:
                    raise UnknownLabel(label, "synthetic spec")

    @staticmethod
    def _expand(value: Any, n_features: int, what: str) -> np.ndarray:
        if isinstance(value, (int, float)):
            return np.full(n_features, float(value))
        if isinstance(value, Mapping) and "tile" in value:
            pattern = np.asarray(value["tile"], dtype=np.float64)
            if pattern.size == 0 or n_features % pattern.size:
                raise InvalidSpec(f"{what}: tile of length {pattern.size} does not divide n_features={n_features}")
            return np.tile(pattern, n_features // pattern.size)
        array = np.asarray(value, dtype=np.float64)
        if array.shape != (n_features,):
            raise InvalidSpec(f"{what}: expected {n_features} values, got shape {array.shape}")
        return array

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SyntheticSpec:
        """Build from the JSON form used by experiment configs and ``gen-data``.

        ``mean`` and ``std`` accept a full-length list, a scalar, or
        ``{"tile": [...]}``; ``pool_size`` may be set per label or once at the top.
        """
        try:
            n_features = int(data["n_features"])
            default_pool = data.get("pool_size")
            labels: dict[str, LabelDistribution] = {}
            for label, entry in data["labels"].items():
                pool_size = entry.get("pool_size", default_pool)
                if pool_size is None:
                    raise InvalidSpec(f"{label}: pool_size missing")
                labels[label] = LabelDistribution(
                    mean=cls._expand(entry["mean"], n_features, f"{label}.mean"),
                    std=cls._expand(entry.get("std", 1.0), n_features, f"{label}.std"),
                    pool_size=int(pool_size),
                )
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidSpec(f"malformed synthetic spec: {exc}") from exc
        spec = cls(n_features=n_features, labels=labels)
        spec.validate()
        return spec


@dataclass(frozen=True, eq=False)
class LabelPools:
    """Per-label pools of private rows that shards are drawn from."""

    label_space: LabelSpace
    features: Mapping[str, np.ndarray]
    n_features: int

    def size(self, label: str) -> int:
        pool = self.features.get(label)
        return 0 if pool is None else int(pool.shape[0])

    def total_rows(self) -> int:
        return sum(self.size(label) for label in self.label_space.labels)

    def as_dataset(self) -> Dataset:
        parts = [
            Dataset(self.features[label], np.full(self.size(label), self.label_space.index(label)), self.label_space)
            for label in self.label_space.labels if self.size(label)
        ]
        return Dataset.concat(parts, self.label_space, self.n_features)


@dataclass(frozen=True)
class ShardSchedule:
    """One client's planned per-label shard sizes across iterations."""

    labels: tuple[str, ...]
    default_sizes: Mapping[str, int]
    overrides: Mapping[int, Mapping[str, int]] = field(default_factory=dict)
    skew: Mapping[int, Mapping[str, float]] = field(default_factory=dict)

    def base_sizes(self, iteration: int) -> dict[str, int]:
        sizes = dict(self.default_sizes)
        sizes.update(self.overrides.get(iteration, {}))
        return {label: int(sizes.get(label, 0)) for label in self.labels}

    def sizes(self, iteration: int) -> dict[str, int]:
        base = self.base_sizes(iteration)
        multipliers = self.skew.get(iteration)
        if not multipliers:
            return base
        return apply_skew(base, multipliers, self.labels)


def apply_skew(base: Mapping[str, int], multipliers: Mapping[str, float],
               order: tuple[str, ...]) -> dict[str, int]:
    """Reweight class proportions, keeping the iteration total fixed.

    Largest-remainder rounding, ties broken by label order.
    """
    total = sum(base.values())
    weights = np.array([base[label] * float(multipliers.get(label, 1.0)) for label in order])
    if total == 0 or weights.sum() <= 0:
        return dict(base)
    raw = total * weights / weights.sum()
    floors = np.floor(raw).astype(np.int64)
    remainder = total - int(floors.sum())
    fractions = raw - floors
    # stable sort keeps label order among equal fractions
    for k in np.argsort(-fractions, kind="stable")[:remainder]:
        floors[k] += 1
    return {label: int(floors[k]) for k, label in enumerate(order)}


@dataclass(frozen=True)
class PartitionPlan:
    clients: tuple[str, ...]
    schedules: Mapping[str, ShardSchedule]

    def client_index(self, client: str) -> int:
        return self.clients.index(client)

    def counts(self, client: str, iteration: int) -> dict[str, int]:
        if client not in self.schedules:
            raise KeyError(f"no partition plan for client {client!r}")
        if iteration < 1:
            raise ValueError(f"iterations start at 1, got {iteration}")
        return self.schedules[client].sizes(iteration)

    def claimants(self, label: str) -> tuple[str, ...]:
        return tuple(c for c in self.clients if label in self.schedules[c].labels)


@dataclass(frozen=True)
class ReshuffleEvent:
    client: str
    label: str
    iteration: int
    epoch: int

    def to_dict(self) -> dict[str, Any]:
        return {"client": self.client, "label": self.label, "iteration": self.iteration, "epoch": self.epoch}


@dataclass(frozen=True, eq=False)
class Shard:
    client: str
    iteration: int
    dataset: Dataset
    pool_indices: Mapping[str, np.ndarray]
    reshuffles: tuple[ReshuffleEvent, ...] = ()

    @property
    def size(self) -> int:
        return self.dataset.n_examples
