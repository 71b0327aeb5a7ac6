from .core_types import Dataset, GlobalScoreState, LabelSpace, ScoreMatrix
from .scores import argmax_label, argmax_rows, restrict_columns

__all__ = [
    "Dataset",
    "GlobalScoreState",
    "LabelSpace",
    "ScoreMatrix",
    "argmax_label",
    "argmax_rows",
    "restrict_columns",
]
