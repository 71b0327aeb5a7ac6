from typing import Sequence

from fedscore.core import GlobalScoreState, ScoreMatrix, restrict_columns
from fedscore.errors import ShapeMismatch


def alpha(shard_size: int, public_size: int) -> float:
    """Private-to-public size ratio weighting the fresh scores."""
    if public_size < 1:
        raise ValueError(f"public_size must be >= 1, got {public_size}")
    if shard_size < 0:
        raise ValueError(f"shard_size must be >= 0, got {shard_size}")
    return shard_size / public_size


def local_update(global_state: GlobalScoreState, fresh: ScoreMatrix, alpha: float,
                 labels: Sequence[str]) -> ScoreMatrix:
    """Blend the global scores of the client's labels with its fresh scores.

    Returns ``restrict(global, labels) + alpha * fresh``; the result carries
    no normalisation guarantee.
    """
    cols = global_state.label_space.ordered(labels)
    if fresh.cols != cols:
        raise ShapeMismatch(f"fresh columns {fresh.cols} do not match client labels {cols}")
    if fresh.rows != global_state.rows:
        raise ShapeMismatch(f"fresh scores have {fresh.rows} rows, global state {global_state.rows}")
    restricted = restrict_columns(global_state.scores, cols)
    return ScoreMatrix(restricted.values + alpha * fresh.values, cols, fresh.label_space)
