import numpy as np

from fedscore.core import ScoreMatrix
from fedscore.errors import LabelOutsideCols, ShapeMismatch

PROBABILITY_FLOOR = 1e-12


def mean_cross_entropy(probs: np.ndarray, positions: np.ndarray) -> float:
    """Mean of -log p(true); ``positions`` index the columns of ``probs``."""
    picked = probs[np.arange(positions.shape[0]), positions]
    return float(np.mean(-np.log(np.maximum(picked, PROBABILITY_FLOOR))))


def cross_entropy(scores: ScoreMatrix, labels) -> float:
    """Categorical cross-entropy of fresh scores against label-space indices."""
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.shape[0] != scores.rows:
        raise ShapeMismatch(f"{labels.shape[0]} labels for {scores.rows} score rows")
    if labels.shape[0] == 0:
        raise ShapeMismatch("cross-entropy of an empty score matrix")
    lookup = np.full(len(scores.label_space), -1, dtype=np.int64)
    for position, index in enumerate(scores.col_indices):
        lookup[index] = position
    positions = lookup[labels]
    if np.any(positions < 0):
        outside = sorted({scores.label_space.labels[k] for k in labels[positions < 0]})
        raise LabelOutsideCols(f"labels {outside} are not among score columns {scores.cols}")
    return mean_cross_entropy(scores.values, positions)
