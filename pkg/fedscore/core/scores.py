from typing import Iterable, Sequence

import numpy as np

from fedscore.core.core_types import LabelSpace, ScoreMatrix
from fedscore.errors import EmptyCandidates, ShapeMismatch, UnknownLabel


def restrict_columns(s: ScoreMatrix, subset: Iterable[str]) -> ScoreMatrix:
    """Project ``s`` onto ``subset``; the result keeps label-space column order."""
    subset = tuple(subset)
    for label in subset:
        if label not in s.cols:
            raise UnknownLabel(label, f"score columns {s.cols}")
    cols = s.label_space.ordered(subset)
    positions = [s.cols.index(label) for label in cols]
    return ScoreMatrix(s.values[:, positions], cols, s.label_space)


def argmax_label(row: Sequence[float] | np.ndarray, candidates: Sequence[str],
                 label_space: LabelSpace | None = None) -> str:
    """Candidate with the highest score; ties go to the lowest label-space index.

    Without ``label_space`` the candidates are assumed to already be in
    label-space order and ties go to the first one.
    """
    if len(candidates) == 0:
        raise EmptyCandidates("argmax over an empty candidate list")
    values = np.asarray(row, dtype=np.float64).reshape(-1)
    if values.shape[0] != len(candidates):
        raise ShapeMismatch(f"{values.shape[0]} scores for {len(candidates)} candidates")
    if not np.all(np.isfinite(values)):
        raise ValueError("scores must be finite")
    tied = np.flatnonzero(values == values.max())
    if label_space is None:
        return candidates[int(tied[0])]
    return min((candidates[int(k)] for k in tied), key=label_space.index)


def argmax_rows(s: ScoreMatrix) -> np.ndarray:
    """Label-space index of the row-wise argmax, lowest index on ties."""
    # np.argmax returns the first maximum and columns are in label-space order
    positions = np.argmax(s.values, axis=1)
    return np.asarray(s.col_indices, dtype=np.int64)[positions]
