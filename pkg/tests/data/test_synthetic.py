import numpy as np
import pytest

from fedscore.core import LabelSpace
from fedscore.data import SyntheticSpec, generate_public, generate_synthetic
from fedscore.errors import InvalidSpec

SPACE = LabelSpace(("x", "y"))


def _spec(**extra) -> SyntheticSpec:
    document = {
        "n_features": 4,
        "pool_size": 50,
        "labels": {
            "x": {"mean": {"tile": [1.0, -1.0]}, "std": 0.5},
            "y": {"mean": [0.0, 0.0, 2.0, 2.0], "std": [1.0, 1.0, 1.0, 2.0], "pool_size": 20},
        },
    }
    document.update(extra)
    return SyntheticSpec.from_dict(document)


def test_from_dict_expands_means_and_stds():
    spec = _spec()
    assert spec.labels["x"].mean.tolist() == [1.0, -1.0, 1.0, -1.0]
    assert spec.labels["x"].std.tolist() == [0.5] * 4
    assert spec.labels["x"].pool_size == 50
    assert spec.labels["y"].pool_size == 20


@pytest.mark.parametrize("document", [
    {"n_features": 3, "pool_size": 5, "labels": {"x": {"mean": {"tile": [1.0, 2.0]}}}},
    {"n_features": 2, "labels": {"x": {"mean": 0.0}}},
    {"n_features": 2, "pool_size": 5, "labels": {"x": {"mean": 0.0, "std": 0.0}}},
    {"n_features": 2, "pool_size": 5, "labels": {"x": {"mean": [1.0, 2.0, 3.0]}}},
    {"n_features": 0, "pool_size": 5, "labels": {"x": {"mean": 0.0}}},
    {"n_features": 2, "pool_size": 5},
])
def test_from_dict_rejects_malformed_specs(document):
    with pytest.raises(InvalidSpec):
        SyntheticSpec.from_dict(document)


def test_validate_against_label_space():
    spec = SyntheticSpec.from_dict({"n_features": 2, "pool_size": 5, "labels": {"x": {"mean": 0.0}}})
    with pytest.raises(InvalidSpec):
        spec.validate(SPACE)


def test_generate_synthetic_is_deterministic():
    spec = _spec()
    first = generate_synthetic(spec, SPACE, seed=42)
    second = generate_synthetic(spec, SPACE, seed=42)
    other = generate_synthetic(spec, SPACE, seed=43)
    assert first.size("x") == 50 and first.size("y") == 20
    assert np.array_equal(first.features["x"], second.features["x"])
    assert not np.array_equal(first.features["x"], other.features["x"])


def test_pools_do_not_depend_on_declaration_order():
    forward = _spec()
    reverse = SyntheticSpec(forward.n_features, dict(reversed(list(forward.labels.items()))))
    a = generate_synthetic(forward, SPACE, seed=1)
    b = generate_synthetic(reverse, SPACE, seed=1)
    assert np.array_equal(a.features["y"], b.features["y"])


def test_pool_statistics_follow_the_distribution():
    spec = SyntheticSpec.from_dict({"n_features": 2, "pool_size": 4000,
                                    "labels": {"x": {"mean": [3.0, -3.0], "std": 0.5},
                                               "y": {"mean": 0.0}}})
    pools = generate_synthetic(spec, SPACE, seed=0)
    assert np.allclose(pools.features["x"].mean(axis=0), [3.0, -3.0], atol=0.05)
    assert np.allclose(pools.features["x"].std(axis=0), [0.5, 0.5], atol=0.05)


def test_public_set_comes_in_label_blocks():
    public = generate_public(_spec(), SPACE, per_label=7, seed=3)
    assert public.labels.tolist() == [0] * 7 + [1] * 7
    pools = generate_synthetic(_spec(), SPACE, seed=3)
    # separate streams: the public set is not a copy of the pools
    assert not np.array_equal(public.features[:7], pools.features["x"][:7])
    with pytest.raises(InvalidSpec):
        generate_public(_spec(), SPACE, per_label=0, seed=3)
