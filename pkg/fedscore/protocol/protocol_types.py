from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from fedscore.core import ScoreMatrix
from fedscore.errors import ShapeMismatch


class AggregateMode(str, Enum):
    # beta-weighted average per label column
    NORMALIZED = "normalized"
    # the displayed formula taken literally: beta-weighted sum
    SUM = "sum"


class BetaAccuracy(str, Enum):
    PER_LABEL = "per_label"
    SUBSET = "subset"


@dataclass(frozen=True, eq=False)
class LocalRound:
    """Snapshot of one client's local phase, handed to the aggregation barrier."""

    client_id: str
    iteration: int
    fresh_scores: ScoreMatrix
    updated_scores: ScoreMatrix
    alpha: float
    shard_size: int

    def __post_init__(self) -> None:
        if self.fresh_scores.cols != self.updated_scores.cols:
            raise ShapeMismatch(
                f"fresh columns {self.fresh_scores.cols} differ from updated {self.updated_scores.cols}")
        if self.fresh_scores.rows != self.updated_scores.rows:
            raise ShapeMismatch("fresh and updated scores differ in row count")
        if self.alpha != self.shard_size / self.fresh_scores.rows:
            raise ValueError(f"alpha {self.alpha} != {self.shard_size}/{self.fresh_scores.rows}")

    @property
    def labels(self) -> tuple[str, ...]:
        return self.updated_scores.cols


@dataclass(frozen=True)
class BetaAssignment:
    betas: Mapping[tuple[str, str], float] = field(default_factory=dict)

    def get(self, client: str, label: str) -> float:
        return self.betas[(client, label)]

    def for_label(self, label: str) -> dict[str, float]:
        return {c: beta for (c, l), beta in self.betas.items() if l == label}

    def scaled(self, label: str, factor: float) -> BetaAssignment:
        """Copy with every beta of ``label`` multiplied by ``factor``."""
        return BetaAssignment({
            key: beta * factor if key[1] == label else beta for key, beta in self.betas.items()
        })
