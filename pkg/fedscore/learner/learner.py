import time
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from fedscore.core import Dataset, LabelSpace, ScoreMatrix
from fedscore.errors import InvalidArch
from fedscore.learner.learner_types import ArchSpec, TrainConfig, TrainResult
from fedscore.learner.model import Model, init_model, predict_scores
from fedscore.learner.trainer import train


class Learner(ABC):
    """A client's local model as the protocol sees it: fit, then score.

    The protocol never inspects a learner beyond its output scores and its
    parameter count (for payload accounting).
    """

    def __init__(self, label_cols: Sequence[str], label_space: LabelSpace):
        self.label_space = label_space
        self.label_cols = label_space.ordered(label_cols)

    @abstractmethod
    def fit(self, shard: Dataset, cfg: TrainConfig, seed: int) -> TrainResult:
        pass

    @abstractmethod
    def predict(self, dataset: Dataset) -> ScoreMatrix:
        pass

    def timed_predict(self, dataset: Dataset) -> tuple[ScoreMatrix, float]:
        started = time.perf_counter()
        scores = self.predict(dataset)
        return scores, time.perf_counter() - started

    @property
    @abstractmethod
    def parameter_count(self) -> int:
        pass

    @property
    @abstractmethod
    def parameters(self) -> np.ndarray:
        """Flat trained parameter vector, used to warm-start the next build."""

    @abstractmethod
    def describe(self) -> str:
        pass


class MLPLearner(Learner):
    def __init__(self, arch: ArchSpec, n_features: int, label_cols: Sequence[str],
                 label_space: LabelSpace, seed: int, initial_parameters: np.ndarray | None = None):
        super().__init__(label_cols, label_space)
        self.model: Model = init_model(arch, n_features, self.label_cols, seed, label_space=label_space)
        if initial_parameters is not None:
            self.model = self.model.with_parameters(initial_parameters)

    def fit(self, shard: Dataset, cfg: TrainConfig, seed: int) -> TrainResult:
        result = train(self.model, shard, cfg, seed)
        self.model = result.model
        return result

    def predict(self, dataset: Dataset) -> ScoreMatrix:
        return predict_scores(self.model, dataset)

    @property
    def parameter_count(self) -> int:
        return self.model.parameter_count

    @property
    def parameters(self) -> np.ndarray:
        return self.model.parameters

    def describe(self) -> str:
        return self.model.arch.describe()


def learner_factory(arch: ArchSpec, n_features: int, label_cols: Sequence[str], label_space: LabelSpace,
                    seed: int, initial_parameters: np.ndarray | None = None) -> Learner:
    if arch.kind == "mlp":
        return MLPLearner(arch, n_features, label_cols, label_space, seed, initial_parameters)
    raise InvalidArch(f"unsupported learner kind {arch.kind!r}")
