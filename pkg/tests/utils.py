import copy
import json
from pathlib import Path

import numpy as np
import pytest

from fedscore.core import Dataset, GlobalScoreState, LabelSpace, ScoreMatrix
from fedscore.utils import load_default_config

_PROJECT_ROOT = Path(__file__).resolve().parent.parent

EXAMPLES_DIR = _PROJECT_ROOT / "fedscore" / "_resources" / "examples"

ANIMALS = ("cat", "dog", "sheep", "elephant")


def find_project_root() -> str:
    return str(_PROJECT_ROOT)


@pytest.fixture
def config():
    return load_default_config()


@pytest.fixture
def animals() -> LabelSpace:
    return LabelSpace(ANIMALS)


def random_scores(rng: np.random.Generator, rows: int, label_space: LabelSpace, cols=None,
                  stochastic: bool = True) -> ScoreMatrix:
    cols = label_space.labels if cols is None else label_space.ordered(cols)
    values = rng.random((rows, len(cols)))
    if stochastic:
        values = values / values.sum(axis=1, keepdims=True)
    return ScoreMatrix(values, cols, label_space)


def global_state(values: np.ndarray, label_space: LabelSpace, iteration: int = 1) -> GlobalScoreState:
    return GlobalScoreState(iteration, ScoreMatrix(values, label_space.labels, label_space))


def block_public(label_space: LabelSpace, per_label, n_features: int = 2, seed: int = 0) -> Dataset:
    """Public set in label blocks; ``per_label`` is an int or a per-label mapping."""
    counts = per_label if isinstance(per_label, dict) else {label: per_label for label in label_space}
    rng = np.random.default_rng(seed)
    labels = np.concatenate([
        np.full(counts.get(label, 0), label_space.index(label), dtype=np.int64) for label in label_space
    ])
    return Dataset(rng.normal(size=(labels.size, n_features)), labels, label_space)


_TINY_DOCUMENT = {
    "name": "tiny",
    "labels": ["a", "b", "c"],
    "iterations": 3,
    "master_seed": 5,
    "data": {
        "source": "synthetic",
        "public_per_label": 10,
        "synthetic": {
            "n_features": 6,
            "pool_size": 60,
            "labels": {
                "a": {"mean": {"tile": [1.0, 0.0]}, "std": 1.0},
                "b": {"mean": {"tile": [0.0, 1.0]}, "std": 1.0},
                "c": {"mean": {"tile": [-1.0, 0.0]}, "std": 1.0},
            },
        },
    },
    "train": {"learning_rate": 0.01, "max_epochs": 3, "batch_size": 8},
    "clients": [
        {
            "id": "u1",
            "labels": ["a", "b"],
            "arch": [
                {"from": 1, "hidden_layers": [{"units": 4, "activation": "relu"}]},
                {"from": 3, "hidden_layers": [{"units": 4, "activation": "softmax"}]},
            ],
            "shard": {"per_label": 10},
        },
        {
            "id": "u2",
            "labels": ["b", "c"],
            "arch": [{"from": 1, "hidden_layers": []}],
            "shard": {"per_label": 10},
        },
    ],
}


def tiny_document() -> dict:
    """A small, valid experiment config that runs in well under a second."""
    return copy.deepcopy(_TINY_DOCUMENT)


def write_document(directory: Path, document: dict, name: str = "experiment.json") -> str:
    path = Path(directory) / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)
