from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

from fedscore.core import LabelSpace
from fedscore.data import PartitionPlan, ReshuffleEvent, ShardSchedule, SyntheticSpec
from fedscore.learner import ArchSpec, TrainConfig
from fedscore.protocol import AggregateMode, BetaAccuracy


@dataclass(frozen=True)
class ArchSchedule:
    """Step function from iteration to architecture; the last step persists."""

    steps: tuple[tuple[int, ArchSpec], ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("an arch schedule needs at least one step")
        starts = [start for start, _ in self.steps]
        if starts[0] != 1:
            raise ValueError(f"the first arch step must start at iteration 1, got {starts[0]}")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError(f"arch steps must start at strictly increasing iterations, got {starts}")

    def at(self, iteration: int) -> ArchSpec:
        current = self.steps[0][1]
        for start, arch in self.steps:
            if start > iteration:
                break
            current = arch
        return current

    def changed_at(self, iteration: int) -> bool:
        return iteration > 1 and self.at(iteration) != self.at(iteration - 1)

    @classmethod
    def constant(cls, arch: ArchSpec) -> ArchSchedule:
        return cls(((1, arch),))


@dataclass(frozen=True)
class ClientConfig:
    client_id: str
    labels: tuple[str, ...]
    arch_schedule: ArchSchedule
    train: TrainConfig
    shard: ShardSchedule


@dataclass(frozen=True)
class DataConfig:
    """Where the public set and the private pools come from."""

    source: str = "synthetic"
    synthetic: SyntheticSpec | None = None
    public_per_label: int = 500
    public_csv: str | None = None
    private_csv: str | None = None
    standardize: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    label_space: LabelSpace
    data: DataConfig
    clients: tuple[ClientConfig, ...]
    iterations: int
    master_seed: int = 0
    aggregate: AggregateMode = AggregateMode.NORMALIZED
    beta_acc: BetaAccuracy = BetaAccuracy.PER_LABEL
    parallel_workers: int = 1
    warm_start: bool = False
    source_path: str | None = field(default=None, compare=False)

    @property
    def plan(self) -> PartitionPlan:
        return PartitionPlan(
            clients=tuple(c.client_id for c in self.clients),
            schedules={c.client_id: c.shard for c in self.clients},
        )

    def client(self, client_id: str) -> ClientConfig:
        for client in self.clients:
            if client.client_id == client_id:
                return client
        raise KeyError(f"unknown client {client_id!r}")


_TIMING_FIELDS = ("train_seconds", "seconds_per_epoch", "inference_seconds")


@dataclass(frozen=True)
class ClientRecord:
    iteration: int
    client: str
    labels: tuple[str, ...]
    shard_size: int
    label_counts: Mapping[str, int]
    alpha: float
    arch: str
    arch_changed: bool
    parameter_count: int
    epochs_run: int
    final_loss: float
    fresh_accuracy: float
    local_update_accuracy: float
    global_update_accuracy: float
    betas: Mapping[str, float]
    score_payload_bytes: int
    weight_payload_bytes: int
    train_seconds: float = 0.0
    seconds_per_epoch: float = 0.0
    inference_seconds: float = 0.0

    @property
    def payload_ratio(self) -> float:
        return self.score_payload_bytes / self.weight_payload_bytes

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        data = {
            "iteration": self.iteration,
            "client": self.client,
            "labels": list(self.labels),
            "shard_size": self.shard_size,
            "label_counts": dict(self.label_counts),
            "alpha": self.alpha,
            "arch": self.arch,
            "arch_changed": self.arch_changed,
            "parameter_count": self.parameter_count,
            "epochs_run": self.epochs_run,
            "final_loss": self.final_loss,
            "fresh_accuracy": self.fresh_accuracy,
            "local_update_accuracy": self.local_update_accuracy,
            "global_update_accuracy": self.global_update_accuracy,
            "betas": dict(self.betas),
            "score_payload_bytes": self.score_payload_bytes,
            "weight_payload_bytes": self.weight_payload_bytes,
            "payload_ratio": self.payload_ratio,
        }
        if include_timing:
            data.update({name: getattr(self, name) for name in _TIMING_FIELDS})
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ClientRecord:
        return cls(
            iteration=int(data["iteration"]),
            client=data["client"],
            labels=tuple(data["labels"]),
            shard_size=int(data["shard_size"]),
            label_counts={k: int(v) for k, v in data["label_counts"].items()},
            alpha=float(data["alpha"]),
            arch=data["arch"],
            arch_changed=bool(data["arch_changed"]),
            parameter_count=int(data["parameter_count"]),
            epochs_run=int(data["epochs_run"]),
            final_loss=float(data["final_loss"]),
            fresh_accuracy=float(data["fresh_accuracy"]),
            local_update_accuracy=float(data["local_update_accuracy"]),
            global_update_accuracy=float(data["global_update_accuracy"]),
            betas={k: float(v) for k, v in data["betas"].items()},
            score_payload_bytes=int(data["score_payload_bytes"]),
            weight_payload_bytes=int(data["weight_payload_bytes"]),
            **{name: float(data.get(name, 0.0)) for name in _TIMING_FIELDS},
        )


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    global_accuracy: float
    clients: tuple[ClientRecord, ...]
    skipped: tuple[str, ...] = ()
    reshuffles: tuple[ReshuffleEvent, ...] = ()

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        return {
            "iteration": self.iteration,
            "global_accuracy": self.global_accuracy,
            "skipped": list(self.skipped),
            "reshuffles": [event.to_dict() for event in self.reshuffles],
            "clients": [record.to_dict(include_timing) for record in self.clients],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> IterationRecord:
        return cls(
            iteration=int(data["iteration"]),
            global_accuracy=float(data["global_accuracy"]),
            clients=tuple(ClientRecord.from_dict(r) for r in data["clients"]),
            skipped=tuple(data.get("skipped", ())),
            reshuffles=tuple(ReshuffleEvent(**event) for event in data.get("reshuffles", ())),
        )


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    master_seed: int
    labels: tuple[str, ...]
    clients: tuple[str, ...]
    aggregate: str
    beta_acc: str
    iterations: tuple[IterationRecord, ...]

    def records(self) -> Iterator[ClientRecord]:
        for iteration in self.iterations:
            yield from iteration.clients

    def records_for(self, client: str) -> list[ClientRecord]:
        return [record for record in self.records() if record.client == client]

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        return {
            "name": self.name,
            "master_seed": self.master_seed,
            "labels": list(self.labels),
            "clients": list(self.clients),
            "aggregate": self.aggregate,
            "beta_acc": self.beta_acc,
            "iterations": [it.to_dict(include_timing) for it in self.iterations],
        }

    def to_json(self) -> str:
        """Canonical serialisation; contains no wall-clock data."""
        return json.dumps(self.to_dict(include_timing=False), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ExperimentReport:
        return cls(
            name=data["name"],
            master_seed=int(data["master_seed"]),
            labels=tuple(data["labels"]),
            clients=tuple(data["clients"]),
            aggregate=data["aggregate"],
            beta_acc=data["beta_acc"],
            iterations=tuple(IterationRecord.from_dict(it) for it in data["iterations"]),
        )


@dataclass(frozen=True)
class SummaryRow:
    user: str
    local_mean: float
    global_mean: float
    records: int

    @property
    def increase(self) -> float:
        return self.global_mean - self.local_mean
