from .learner import Learner, MLPLearner, learner_factory
from .learner_types import (Activation, AdamConfig, AdamState,
                            ArchSpec, EarlyStopConfig, LayerSpec, TrainConfig,
                            TrainResult)
from .loss import cross_entropy
from .model import Model, init_model, predict_scores
from .optim import adam_step
from .trainer import loss_and_gradient, train

__all__ = [
    "Activation",
    "AdamConfig",
    "AdamState",
    "ArchSpec",
    "EarlyStopConfig",
    "LayerSpec",
    "Learner",
    "MLPLearner",
    "Model",
    "TrainConfig",
    "TrainResult",
    "adam_step",
    "cross_entropy",
    "init_model",
    "learner_factory",
    "loss_and_gradient",
    "predict_scores",
    "train",
]
