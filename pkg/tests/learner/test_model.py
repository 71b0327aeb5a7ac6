import numpy as np
import pytest

from fedscore.core import Dataset, LabelSpace
from fedscore.errors import InvalidArch, ShapeMismatch
from fedscore.learner import Activation, ArchSpec, LayerSpec, init_model, loss_and_gradient, predict_scores
from fedscore.learner.loss import mean_cross_entropy
from fedscore.learner.model import forward

SPACE = LabelSpace(("a", "b", "c", "d"))
STEP = 1e-5


def _numeric_gradient(model, features, positions) -> np.ndarray:
    params = model.parameters.copy()
    grad = np.empty_like(params)
    for k in range(params.size):
        plus = params.copy()
        minus = params.copy()
        plus[k] += STEP
        minus[k] -= STEP
        grad[k] = (mean_cross_entropy(forward(model, features, plus)[0], positions)
                   - mean_cross_entropy(forward(model, features, minus)[0], positions)) / (2 * STEP)
    return grad


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denominator = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
    return float(np.max(np.abs(analytic - numeric) / denominator))


def _random_network(seed: int, activations):
    rng = np.random.default_rng(seed)
    layers = tuple(
        LayerSpec(int(rng.integers(1, 6)), activations[int(rng.integers(len(activations)))])
        for _ in range(int(rng.integers(0, 4)))
    )
    n_features = int(rng.integers(2, 6))
    cols = tuple(label for label in SPACE if rng.random() < 0.7) or ("a", "b")
    model = init_model(ArchSpec(layers), n_features, cols, seed, label_space=SPACE)
    features = rng.normal(size=(6, n_features))
    positions = rng.integers(0, len(model.label_cols), size=6)
    return model, features, positions


@pytest.mark.parametrize("seed", range(20))
def test_gradient_matches_finite_differences(seed):
    model, features, positions = _random_network(seed, (Activation.SIGMOID, Activation.SOFTMAX))
    _, analytic = loss_and_gradient(model, model.parameters, features, positions)
    assert _relative_error(analytic, _numeric_gradient(model, features, positions)) < 1e-4


def test_gradient_check_with_per_layer_softmax():
    arch = ArchSpec((LayerSpec(4, Activation.SOFTMAX), LayerSpec(3, Activation.SOFTMAX)))
    model = init_model(arch, 3, ("a", "b", "c"), 0, label_space=SPACE)
    rng = np.random.default_rng(0)
    features = rng.normal(size=(5, 3))
    positions = np.array([0, 1, 2, 0, 1])
    _, analytic = loss_and_gradient(model, model.parameters, features, positions)
    assert _relative_error(analytic, _numeric_gradient(model, features, positions)) < 1e-4


def test_gradient_check_with_relu_away_from_the_kink():
    # pick the first instance whose pre-activations stay clear of zero
    for seed in range(100):
        model, features, positions = _random_network(seed, (Activation.RELU,))
        _, cache = forward(model, features)
        hidden = [z for (_, z, _), layer in zip(cache, model.layout) if layer.activation is not None]
        if hidden and min(float(np.min(np.abs(z))) for z in hidden) > 1e-3:
            break
    else:
        pytest.fail("no relu instance clear of the kink")
    _, analytic = loss_and_gradient(model, model.parameters, features, positions)
    assert _relative_error(analytic, _numeric_gradient(model, features, positions)) < 1e-4


def test_init_is_deterministic_glorot():
    arch = ArchSpec((LayerSpec(8),))
    first = init_model(arch, 10, ("a", "b"), 3, label_space=SPACE)
    second = init_model(arch, 10, ("b", "a"), 3, label_space=SPACE)
    assert np.array_equal(first.parameters, second.parameters)
    assert first.label_cols == ("a", "b")
    assert first.parameter_count == 10 * 8 + 8 + 8 * 2 + 2
    hidden = first.layout[0]
    weights = first.parameters[hidden.w_start:hidden.w_stop]
    assert np.all(np.abs(weights) <= np.sqrt(6.0 / 18))
    assert not first.parameters[hidden.w_stop:hidden.b_stop].any()


def test_init_rejects_bad_arch():
    with pytest.raises(InvalidArch):
        init_model(ArchSpec((LayerSpec(0),)), 3, ("a",), 0, label_space=SPACE)
    with pytest.raises(InvalidArch):
        init_model(ArchSpec(kind="cnn"), 3, ("a",), 0, label_space=SPACE)


def test_predict_scores_are_row_stochastic():
    model = init_model(ArchSpec((LayerSpec(5, Activation.SIGMOID),)), 4, ("d", "b"), 1, label_space=SPACE)
    dataset = Dataset(np.random.default_rng(2).normal(size=(9, 4)), np.zeros(9, dtype=np.int64), SPACE)
    scores = predict_scores(model, dataset)
    assert scores.cols == ("b", "d")
    assert scores.rows == 9
    assert scores.is_row_stochastic(1e-9)


def test_predict_scores_feature_mismatch():
    model = init_model(ArchSpec(), 4, ("a", "b"), 1, label_space=SPACE)
    with pytest.raises(ShapeMismatch):
        predict_scores(model, Dataset(np.zeros((2, 3)), [0, 1], SPACE))


def test_arch_spec_from_dict():
    arch = ArchSpec.from_dict({"hidden_layers": [{"units": 16, "activation": "softmax"}, {"units": 32}]})
    assert arch.describe() == "softmax(16)-relu(32)"
    assert ArchSpec.from_dict(arch.to_dict()) == arch
    assert ArchSpec().describe() == "softmax-regression"
    with pytest.raises(InvalidArch):
        ArchSpec.from_dict({"hidden_layers": [{"units": 4, "activation": "tanh"}]})
