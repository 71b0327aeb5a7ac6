from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from fedscore.errors import ShapeMismatch, UnknownLabel


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LabelSpace:
    """Ordered global label set; column order of every score matrix follows it."""

    labels: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if not labels:
            raise ValueError("LabelSpace needs at least one label")
        for label in labels:
            if not isinstance(label, str) or not label:
                raise ValueError(f"Labels must be non-empty strings, got {label!r}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"Duplicate labels in {labels}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {label: k for k, label in enumerate(labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(label, "label space") from None

    def ordered(self, subset: Iterable[str]) -> tuple[str, ...]:
        """Return ``subset`` deduplicated and sorted in label-space order."""
        unique = set(subset)
        for label in unique:
            self.index(label)
        return tuple(label for label in self.labels if label in unique)

    def indices(self, subset: Iterable[str]) -> np.ndarray:
        return np.array([self.index(label) for label in subset], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    label_space: LabelSpace

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise ShapeMismatch(f"features must be 2-D, got shape {features.shape}")
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if labels.shape[0] != features.shape[0]:
            raise ShapeMismatch(
                f"{features.shape[0]} feature rows but {labels.shape[0]} labels")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.label_space)):
            raise ValueError("label index outside the label space")
        object.__setattr__(self, "features", _frozen_array(features, np.float64))
        object.__setattr__(self, "labels", _frozen_array(labels, np.int64))

    @property
    def n_examples(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def __len__(self) -> int:
        return self.n_examples

    def subset(self, indices: Sequence[int] | np.ndarray) -> Dataset:
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.label_space)

    def with_features(self, features: np.ndarray) -> Dataset:
        return Dataset(features, self.labels, self.label_space)

    def label_counts(self) -> dict[str, int]:
        counts = np.bincount(self.labels, minlength=len(self.label_space))
        return {label: int(counts[k]) for k, label in enumerate(self.label_space.labels)}

    def label_names(self) -> tuple[str, ...]:
        return tuple(self.label_space.labels[k] for k in self.labels)

    @classmethod
    def empty(cls, n_features: int, label_space: LabelSpace) -> Dataset:
        return cls(np.zeros((0, n_features)), np.zeros(0, dtype=np.int64), label_space)

    @classmethod
    def concat(cls, parts: Sequence[Dataset], label_space: LabelSpace, n_features: int) -> Dataset:
        if not parts:
            return cls.empty(n_features, label_space)
        return cls(
            np.concatenate([p.features for p in parts], axis=0),
            np.concatenate([p.labels for p in parts], axis=0),
            label_space,
        )


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Per-example, per-label scores over an ordered subset of a label space."""

    values: np.ndarray
    cols: tuple[str, ...]
    label_space: LabelSpace

    def __post_init__(self) -> None:
        cols = tuple(self.cols)
        if not cols:
            raise ShapeMismatch("ScoreMatrix needs at least one column")
        if cols != self.label_space.ordered(cols) or len(cols) != len(set(cols)):
            raise ValueError(f"columns {cols} are not in label-space order")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != len(cols):
            raise ShapeMismatch(
                f"values of shape {values.shape} do not match {len(cols)} columns")
        if not np.all(np.isfinite(values)):
            raise ValueError("score values must be finite")
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "values", _frozen_array(values, np.float64))

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def col_indices(self) -> tuple[int, ...]:
        return tuple(self.label_space.index(label) for label in self.cols)

    def column(self, label: str) -> np.ndarray:
        try:
            return self.values[:, self.cols.index(label)]
        except ValueError:
            raise UnknownLabel(label, "score columns") from None

    def is_row_stochastic(self, tol: float = 1e-6) -> bool:
        if self.values.size == 0:
            return True
        in_range = np.all(self.values >= -tol) and np.all(self.values <= 1.0 + tol)
        return bool(in_range and np.all(np.abs(self.values.sum(axis=1) - 1.0) <= tol))

    def equals(self, other: ScoreMatrix) -> bool:
        """Bit-exact equality of columns and values."""
        return (
            self.cols == other.cols
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    @classmethod
    def zeros(cls, rows: int, label_space: LabelSpace, cols: Sequence[str] | None = None) -> ScoreMatrix:
        cols = label_space.labels if cols is None else label_space.ordered(cols)
        return cls(np.zeros((rows, len(cols))), cols, label_space)


@dataclass(frozen=True, eq=False)
class GlobalScoreState:
    """Coordinator consensus scores over the full label space and public set."""

    iteration: int
    scores: ScoreMatrix

    def __post_init__(self) -> None:
        if self.iteration < 0:
            raise ValueError("iteration must be >= 0")
        if self.scores.cols != self.scores.label_space.labels:
            raise ShapeMismatch("global scores must cover the full label space")
        if self.iteration == 0 and np.any(self.scores.values != 0.0):
            raise ValueError("the initial global state must be all zeros")

    @property
    def label_space(self) -> LabelSpace:
        return self.scores.label_space

    @property
    def rows(self) -> int:
        return self.scores.rows

    @classmethod
    def initial(cls, public_rows: int, label_space: LabelSpace) -> GlobalScoreState:
        return cls(0, ScoreMatrix.zeros(public_rows, label_space))
