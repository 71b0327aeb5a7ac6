import numpy as np
import pytest

from fedscore.core import Dataset, LabelSpace
from fedscore.errors import EmptyShard, InvalidArch, LabelOutsideCols, ShapeMismatch
from fedscore.learner import (Activation, AdamConfig, ArchSpec, EarlyStopConfig, LayerSpec, MLPLearner,
                              TrainConfig, init_model, learner_factory, train)
from fedscore.learner.model import predict_scores

SPACE = LabelSpace(("a", "b", "c"))


def _separable(n: int = 200, seed: int = 0) -> Dataset:
    rng = np.random.default_rng(seed)
    half = n // 2
    features = np.concatenate([rng.normal(-2.0, 0.5, size=(half, 2)), rng.normal(2.0, 0.5, size=(half, 2))])
    labels = np.array([0] * half + [2] * half)
    return Dataset(features, labels, SPACE)


def _accuracy(model, dataset: Dataset) -> float:
    scores = predict_scores(model, dataset)
    predicted = np.asarray(scores.col_indices)[np.argmax(scores.values, axis=1)]
    return float(np.mean(predicted == dataset.labels))


def test_train_separates_a_toy_problem():
    shard = _separable()
    model = init_model(ArchSpec(), 2, ("a", "c"), 0, label_space=SPACE)
    cfg = TrainConfig(learning_rate=0.05, max_epochs=50, batch_size=32,
                      early_stop=EarlyStopConfig(patience=50, min_delta=0.0))
    result = train(model, shard, cfg, seed=1)
    assert _accuracy(result.model, shard) > 0.95
    assert result.epoch_losses[-1] < result.epoch_losses[0]


def _perceptron(dataset: Dataset, max_passes: int = 1000) -> np.ndarray:
    x = np.hstack([dataset.features, np.ones((dataset.n_examples, 1))])
    y = np.where(dataset.labels == 0, -1.0, 1.0)
    w = np.zeros(x.shape[1])
    for _ in range(max_passes):
        mistakes = 0
        for xi, yi in zip(x, y):
            if yi * (xi @ w) <= 0:
                w += yi * xi
                mistakes += 1
        if mistakes == 0:
            return w
    raise AssertionError("perceptron did not converge")


@pytest.mark.parametrize("seed", range(10))
def test_softmax_regression_fits_twenty_separable_points_in_five_epochs(seed):
    shard = _separable(20, seed=seed)
    w = _perceptron(shard)
    assert np.all((np.hstack([shard.features, np.ones((20, 1))]) @ w > 0) == (shard.labels == 2))

    model = init_model(ArchSpec(), 2, ("a", "c"), seed, label_space=SPACE)
    # lr 0.1 with batches of 2 gives 50 Adam steps, enough to undo any initial orientation
    cfg = TrainConfig(learning_rate=0.1, max_epochs=5, batch_size=2,
                      early_stop=EarlyStopConfig(patience=5, min_delta=0.0))
    result = train(model, shard, cfg, seed=seed)
    assert result.epochs_run <= 5
    assert _accuracy(result.model, shard) == 1.0


def test_train_is_deterministic_in_the_seed():
    shard = _separable(60)
    arch = ArchSpec((LayerSpec(4, Activation.SIGMOID),))
    model = init_model(arch, 2, ("a", "c"), 5, label_space=SPACE)
    cfg = TrainConfig(learning_rate=0.01, max_epochs=3, batch_size=8)
    first = train(model, shard, cfg, seed=2)
    second = train(model, shard, cfg, seed=2)
    assert np.array_equal(first.model.parameters, second.model.parameters)
    assert first.epoch_losses == second.epoch_losses
    # the input model is not modified
    assert np.array_equal(model.parameters, init_model(arch, 2, ("a", "c"), 5, label_space=SPACE).parameters)


@pytest.mark.parametrize("max_epochs", [1, 2, 5])
def test_epochs_never_exceed_the_cap(max_epochs):
    model = init_model(ArchSpec(), 2, ("a", "c"), 0, label_space=SPACE)
    cfg = TrainConfig(learning_rate=0.01, max_epochs=max_epochs, batch_size=16,
                      early_stop=EarlyStopConfig(patience=10, min_delta=0.0))
    result = train(model, _separable(40), cfg)
    assert 1 <= result.epochs_run <= max_epochs
    assert len(result.epoch_losses) == result.epochs_run


def test_early_stop_after_patience_epochs_without_progress():
    model = init_model(ArchSpec(), 2, ("a", "c"), 0, label_space=SPACE)
    cfg = TrainConfig(learning_rate=0.01, max_epochs=10, batch_size=16,
                      early_stop=EarlyStopConfig(patience=1, min_delta=1e9))
    assert train(model, _separable(40), cfg).epochs_run == 2


def test_train_errors():
    model = init_model(ArchSpec(), 2, ("a", "c"), 0, label_space=SPACE)
    cfg = TrainConfig()
    with pytest.raises(EmptyShard):
        train(model, Dataset.empty(2, SPACE), cfg)
    with pytest.raises(ShapeMismatch):
        train(model, Dataset(np.zeros((2, 3)), [0, 2], SPACE), cfg)
    with pytest.raises(LabelOutsideCols):
        train(model, Dataset(np.zeros((2, 2)), [0, 1], SPACE), cfg)


@pytest.mark.parametrize("kwargs", [
    {"max_epochs": 0},
    {"learning_rate": 0.0},
    {"batch_size": 0},
    {"early_stop": EarlyStopConfig(patience=0)},
])
def test_train_config_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        TrainConfig(**kwargs)


def test_train_config_from_dict_fills_defaults():
    cfg = TrainConfig.from_dict({"learning_rate": 0.1, "early_stop": {"patience": 3}})
    assert cfg.learning_rate == 0.1
    assert cfg.max_epochs == 5
    assert cfg.early_stop.patience == 3
    assert cfg.adam == AdamConfig()
    assert cfg.adam.beta2 == 0.999


def test_mlp_learner_fit_and_predict():
    learner = learner_factory(ArchSpec((LayerSpec(3),)), 2, ("c", "a"), SPACE, seed=4)
    assert isinstance(learner, MLPLearner)
    assert learner.label_cols == ("a", "c")
    assert learner.parameter_count == 2 * 3 + 3 + 3 * 2 + 2
    result = learner.fit(_separable(40), TrainConfig(learning_rate=0.05, max_epochs=2, batch_size=8), seed=0)
    assert np.array_equal(learner.parameters, result.model.parameters)
    scores, seconds = learner.timed_predict(_separable(10, seed=3))
    assert scores.cols == ("a", "c") and scores.is_row_stochastic(1e-9)
    assert seconds >= 0.0
    assert learner.describe() == "relu(3)"


def test_learner_warm_start_uses_given_parameters():
    arch = ArchSpec((LayerSpec(3),))
    donor = learner_factory(arch, 2, ("a", "c"), SPACE, seed=1)
    warm = learner_factory(arch, 2, ("a", "c"), SPACE, seed=2, initial_parameters=donor.parameters)
    assert np.array_equal(warm.parameters, donor.parameters)
    with pytest.raises(ShapeMismatch):
        learner_factory(arch, 2, ("a", "c"), SPACE, seed=2, initial_parameters=np.zeros(3))


def test_learner_factory_rejects_unknown_kind():
    with pytest.raises(InvalidArch):
        learner_factory(ArchSpec(kind="forest"), 2, ("a",), SPACE, seed=0)
