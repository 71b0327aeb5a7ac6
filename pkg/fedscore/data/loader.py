import os
from dataclasses import dataclass

import numpy as np

from fedscore import logging as fedscore_logging
from fedscore.core import Dataset, LabelSpace
from fedscore.data.data_types import LabelPools
from fedscore.errors import ParseError, UnknownLabel

logger = fedscore_logging.get_logger(__name__)


def _expected_header(n_features: int) -> list[str]:
    return ["label"] + [f"f{k}" for k in range(n_features)]


def load_csv_dataset(path: str, label_space: LabelSpace) -> Dataset:
    """Read a ``label,f0,...,f{d-1}`` CSV; rows keep file order."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        lines = handle.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(path, 1, "empty file, expected a header")

    header = lines[0].split(",")
    n_features = len(header) - 1
    if n_features < 1 or header != _expected_header(n_features):
        raise ParseError(path, 1, f"bad header {lines[0]!r}")

    features = np.empty((len(lines) - 1, n_features), dtype=np.float64)
    labels = np.empty(len(lines) - 1, dtype=np.int64)
    for row, line in enumerate(lines[1:]):
        lineno = row + 2
        fields = line.split(",")
        if len(fields) != n_features + 1:
            raise ParseError(path, lineno, f"expected {n_features + 1} fields, got {len(fields)}")
        label = fields[0]
        if label not in label_space:
            raise UnknownLabel(label, f"{path}:{lineno}")
        labels[row] = label_space.index(label)
        try:
            features[row] = [float(value) for value in fields[1:]]
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from exc
        if not np.all(np.isfinite(features[row])):
            raise ParseError(path, lineno, "non-finite feature value")

    logger.debug("Loaded %d rows x %d features from %s", len(labels), n_features, path)
    return Dataset(features, labels, label_space)


def write_csv_dataset(path: str, dataset: Dataset) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(_expected_header(dataset.n_features)) + "\n")
        for label, row in zip(dataset.label_names(), dataset.features):
            handle.write(label + "," + ",".join(repr(float(v)) for v in row) + "\n")


def pools_from_dataset(dataset: Dataset) -> LabelPools:
    """Group rows by label, keeping file order inside each pool."""
    features = {
        label: dataset.features[dataset.labels == k]
        for k, label in enumerate(dataset.label_space.labels)
    }
    return LabelPools(dataset.label_space, features, dataset.n_features)


@dataclass(frozen=True, eq=False)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, public: Dataset) -> "Standardizer":
        mean = public.features.mean(axis=0)
        scale = public.features.std(axis=0)
        # constant features pass through centred but unscaled
        scale = np.where(scale > 0, scale, 1.0)
        return cls(mean, scale)

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.scale

    def apply(self, dataset: Dataset) -> Dataset:
        return dataset.with_features(self.transform(dataset.features))

    def apply_pools(self, pools: LabelPools) -> LabelPools:
        features = {label: self.transform(rows) for label, rows in pools.features.items()}
        return LabelPools(pools.label_space, features, pools.n_features)
