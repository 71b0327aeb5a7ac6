from .aggregation import assign_beta, global_update, label_claims
from .local_update import alpha, local_update
from .metrics import evaluate_user_accuracy, overall_accuracy, per_label_accuracy
from .protocol_types import AggregateMode, BetaAccuracy, BetaAssignment, LocalRound

__all__ = [
    "AggregateMode",
    "BetaAccuracy",
    "BetaAssignment",
    "LocalRound",
    "alpha",
    "assign_beta",
    "evaluate_user_accuracy",
    "global_update",
    "label_claims",
    "local_update",
    "overall_accuracy",
    "per_label_accuracy",
]
