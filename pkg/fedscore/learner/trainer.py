import time

import numpy as np

from fedscore import logging as fedscore_logging
from fedscore import utils
from fedscore.core import Dataset
from fedscore.errors import EmptyShard, LabelOutsideCols, ShapeMismatch
from fedscore.learner.learner_types import AdamState, TrainConfig, TrainResult
from fedscore.learner.loss import mean_cross_entropy
from fedscore.learner.model import Model, backward, forward
from fedscore.learner.optim import adam_step

logger = fedscore_logging.get_logger(__name__)


def loss_and_gradient(model: Model, params: np.ndarray, features: np.ndarray,
                      positions: np.ndarray) -> tuple[float, np.ndarray]:
    probs, cache = forward(model, features, params)
    return mean_cross_entropy(probs, positions), backward(model, params, cache, positions)


def train(model: Model, shard: Dataset, cfg: TrainConfig, seed: int = 0) -> TrainResult:
    """Mini-batch Adam on cross-entropy with early stopping on epoch-mean loss.

    Stops after ``cfg.max_epochs`` epochs, or earlier once the epoch loss has
    failed to improve by ``min_delta`` for ``patience`` epochs in a row.
    """
    if shard.n_examples == 0:
        raise EmptyShard("cannot train on an empty shard")
    if shard.n_features != model.n_features:
        raise ShapeMismatch(f"model expects {model.n_features} features, shard has {shard.n_features}")
    positions = model.label_positions(shard.labels)
    if np.any(positions < 0):
        outside = sorted({shard.label_space.labels[k] for k in shard.labels[positions < 0]})
        raise LabelOutsideCols(f"shard labels {outside} are not model outputs {model.label_cols}")

    started = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(seed))
    params = model.parameters.copy()
    state = AdamState.fresh(params.size)
    best = np.inf
    stale = 0
    losses: list[float] = []

    for epoch in range(cfg.max_epochs):
        total = 0.0
        for batch in utils.chunked(rng.permutation(shard.n_examples), cfg.batch_size):
            loss, grad = loss_and_gradient(model, params, shard.features[batch], positions[batch])
            total += loss * batch.size
            params, state = adam_step(params, grad, state, cfg.learning_rate, cfg.adam)
        epoch_loss = total / shard.n_examples
        if not np.isfinite(epoch_loss):
            raise FloatingPointError(f"training loss diverged at epoch {epoch + 1}")
        losses.append(epoch_loss)

        if epoch_loss < best - cfg.early_stop.min_delta:
            best = epoch_loss
            stale = 0
        else:
            stale += 1
            if stale >= cfg.early_stop.patience:
                break

    elapsed = time.perf_counter() - started
    logger.debug("Trained %s for %d epochs (loss %.6f)", model.arch.describe(), len(losses), losses[-1],
                 extra=fedscore_logging.round_fields(epochs_run=len(losses)))
    return TrainResult(model.with_parameters(params), len(losses), tuple(losses), elapsed)
