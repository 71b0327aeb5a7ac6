from typing import Sequence

import numpy as np

from fedscore.core import Dataset, GlobalScoreState, ScoreMatrix, argmax_rows, restrict_columns
from fedscore.errors import NoEligibleExamples, ShapeMismatch


def _predictions(scores: ScoreMatrix, public: Dataset, labels: Sequence[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    if scores.rows != public.n_examples:
        raise ShapeMismatch(f"scores have {scores.rows} rows, public set {public.n_examples}")
    cols = public.label_space.ordered(labels)
    return argmax_rows(restrict_columns(scores, cols)), cols


def per_label_accuracy(updated: ScoreMatrix, public: Dataset, labels: Sequence[str]) -> dict[str, float]:
    """Per-label recall over the client's label columns.

    A label without public examples scores 0.0.
    """
    predicted, cols = _predictions(updated, public, labels)
    result: dict[str, float] = {}
    for label in cols:
        index = public.label_space.index(label)
        mask = public.labels == index
        result[label] = float(np.mean(predicted[mask] == index)) if mask.any() else 0.0
    return result


def evaluate_user_accuracy(scores: ScoreMatrix, public: Dataset, labels: Sequence[str]) -> float:
    """Accuracy over public examples whose true label is one of ``labels``.

    Prediction is the argmax over the ``labels`` columns only; used for both
    the local-update and the global-update accuracy of a client.
    """
    predicted, cols = _predictions(scores, public, labels)
    eligible = np.isin(public.labels, public.label_space.indices(cols))
    if not eligible.any():
        raise NoEligibleExamples(f"no public example carries a label in {cols}")
    return float(np.mean(predicted[eligible] == public.labels[eligible]))


def overall_accuracy(state: GlobalScoreState, public: Dataset) -> float:
    """Accuracy of the global scores over the full public set and label space."""
    if state.rows != public.n_examples:
        raise ShapeMismatch(f"global state has {state.rows} rows, public set {public.n_examples}")
    if public.n_examples == 0:
        raise NoEligibleExamples("empty public set")
    return float(np.mean(argmax_rows(state.scores) == public.labels))
