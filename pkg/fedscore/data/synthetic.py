import numpy as np

from fedscore import utils
from fedscore.core import Dataset, LabelSpace
from fedscore.data.data_types import LabelPools, SyntheticSpec
from fedscore.errors import InvalidSpec


def generate_synthetic(spec: SyntheticSpec, label_space: LabelSpace, seed: int) -> LabelPools:
    """Draw ``pool_size`` rows per label from the label's diagonal Gaussian.

    Each label draws from its own PCG64 stream, so pools do not depend on the
    order labels are declared in.
    """
    spec.validate(label_space)
    features: dict[str, np.ndarray] = {}
    for label in label_space.labels:
        dist = spec.labels[label]
        rng = utils.derive_rng(seed, utils.STREAM_SYNTHETIC, label_space.index(label))
        features[label] = rng.normal(dist.mean, dist.std, size=(dist.pool_size, spec.n_features))
    return LabelPools(label_space, features, spec.n_features)


def generate_public(spec: SyntheticSpec, label_space: LabelSpace, per_label: int, seed: int) -> Dataset:
    """Public set drawn from the same distributions on a separate stream.

    Rows come in label blocks following label-space order.
    """
    if per_label < 1:
        raise InvalidSpec(f"public_per_label must be >= 1, got {per_label}")
    spec.validate(label_space)
    blocks = []
    labels = []
    for label in label_space.labels:
        dist = spec.labels[label]
        rng = utils.derive_rng(seed, utils.STREAM_PUBLIC, label_space.index(label))
        blocks.append(rng.normal(dist.mean, dist.std, size=(per_label, spec.n_features)))
        labels.append(np.full(per_label, label_space.index(label), dtype=np.int64))
    return Dataset(np.concatenate(blocks), np.concatenate(labels), label_space)
